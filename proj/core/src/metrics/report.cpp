#include "coex/metrics/report.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "coex/error.hpp"
#include "coex/metrics/similarity.hpp"

namespace coex::metrics {
namespace {

void check_groups(const std::vector<DocumentGroup>& groups) {
  std::set<std::string> seen;
  for (const auto& g : groups) {
    if (g.documents.empty()) throw_validation("group '" + g.label + "' has no documents");
    if (!seen.insert(g.label).second) throw_validation("duplicate group label '" + g.label + "'");
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

DocumentMetrics document_metrics(std::string_view document, const StopwordList& stopwords) {
  TokenizedText tt = tokenize(document);
  DocumentMetrics m;
  m.vocabulary = static_cast<double>(vocabulary(tt));
  m.lexical_density = lexical_density(tt, stopwords);
  m.tokens = static_cast<double>(tt.tokens.size());
  Readability r = readability(tt);
  m.gunning_fog = r.gunning_fog;
  m.flesch_reading_ease = r.flesch_reading_ease;
  m.flesch_kincaid = r.flesch_kincaid;
  return m;
}

double median(std::vector<double> values) {
  if (values.empty()) throw_validation("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<MetricsRow> median_report(const std::vector<DocumentGroup>& groups,
                                      const StopwordList& stopwords) {
  check_groups(groups);
  std::vector<MetricsRow> rows;
  for (const auto& g : groups) {
    std::vector<double> vocab, density, tokens, gf, fre, fk;
    for (std::size_t i = 0; i < g.documents.size(); ++i) {
      DocumentMetrics m;
      try {
        m = document_metrics(g.documents[i], stopwords);
      } catch (const Error& e) {
        throw Error(e.kind(), "group '" + g.label + "' document " + std::to_string(i) + ": " +
                                  e.what());
      }
      vocab.push_back(m.vocabulary);
      density.push_back(m.lexical_density);
      tokens.push_back(m.tokens);
      gf.push_back(m.gunning_fog);
      fre.push_back(m.flesch_reading_ease);
      fk.push_back(m.flesch_kincaid);
    }
    MetricsRow row;
    row.source_label = g.label;
    row.n_documents = g.documents.size();
    row.medians = {median(vocab), median(density), median(tokens),
                   median(gf),    median(fre),     median(fk)};
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SimilarityRow> similarity_report(const std::vector<DocumentGroup>& groups,
                                             EmbeddingProvider* provider) {
  check_groups(groups);
  std::vector<SimilarityRow> rows;
  for (const auto& ref : groups) {
    for (const auto& src : groups) {
      if (&ref == &src) continue;
      SimilarityRow row;
      row.reference_label = ref.label;
      row.source_label = src.label;
      double chrf_sum = 0.0, meteor_sum = 0.0, cos_sum = 0.0, f1_sum = 0.0;
      for (const auto& r : ref.documents) {
        for (const auto& s : src.documents) {
          chrf_sum += chrf(s, r);
          meteor_sum += meteor_exact(s, r);
          if (provider) {
            EmbeddingScores e = embedding_similarity(s, r, *provider);
            cos_sum += e.cosine;
            f1_sum += e.bertscore_f1;
          }
          ++row.pairs;
        }
      }
      const double n = static_cast<double>(row.pairs);
      row.chrf = chrf_sum / n;
      row.meteor = meteor_sum / n;
      if (provider) {
        row.embedding_cosine = cos_sum / n;
        row.bertscore_f1 = f1_sum / n;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

CorpusReport corpus_report(const std::vector<DocumentGroup>& groups,
                           const StopwordList& stopwords, EmbeddingProvider* provider) {
  CorpusReport report;
  report.tokenizer_version = std::string(kTokenizerVersion);
  report.stopwords_version = stopwords.version();
  report.stopwords_digest = stopwords.digest();
  if (provider) report.embedding_provider = provider->name();
  report.lexical = median_report(groups, stopwords);
  report.similarity = similarity_report(groups, provider);
  return report;
}

nlohmann::json to_json(const CorpusReport& report) {
  nlohmann::json lexical = nlohmann::json::array();
  for (const auto& r : report.lexical) {
    lexical.push_back({{"source", r.source_label},
                       {"n", r.n_documents},
                       {"vocabulary", r.medians.vocabulary},
                       {"lexical_density", r.medians.lexical_density},
                       {"tokens", r.medians.tokens},
                       {"gf", r.medians.gunning_fog},
                       {"fre", r.medians.flesch_reading_ease},
                       {"fk", r.medians.flesch_kincaid}});
  }
  nlohmann::json similarity = nlohmann::json::array();
  for (const auto& r : report.similarity) {
    nlohmann::json row = {{"reference", r.reference_label},
                          {"source", r.source_label},
                          {"pairs", r.pairs},
                          {"chrf", r.chrf},
                          {"meteor", r.meteor},
                          {"embedding_cosine", nullptr},
                          {"bertscore_f1", nullptr}};
    if (r.embedding_cosine) row["embedding_cosine"] = *r.embedding_cosine;
    if (r.bertscore_f1) row["bertscore_f1"] = *r.bertscore_f1;
    similarity.push_back(std::move(row));
  }
  nlohmann::json meta = {{"tokenizer", report.tokenizer_version},
                         {"stopwords_version", report.stopwords_version},
                         {"stopwords_digest", report.stopwords_digest},
                         {"embedding_provider", nullptr}};
  if (report.embedding_provider) meta["embedding_provider"] = *report.embedding_provider;
  return {{"metadata", meta}, {"lexical", lexical}, {"similarity", similarity}};
}

std::string to_csv(const CorpusReport& report) {
  std::ostringstream os;
  os << "source,n,vocabulary,lexical_density,tokens,gf,fre,fk\n";
  for (const auto& r : report.lexical) {
    os << csv_field(r.source_label) << ',' << r.n_documents << ',' << num(r.medians.vocabulary)
       << ',' << num(r.medians.lexical_density) << ',' << num(r.medians.tokens) << ','
       << num(r.medians.gunning_fog) << ',' << num(r.medians.flesch_reading_ease) << ','
       << num(r.medians.flesch_kincaid) << '\n';
  }
  os << '\n' << "reference,source,pairs,chrf,meteor,use,bertscore\n";
  for (const auto& r : report.similarity) {
    os << csv_field(r.reference_label) << ',' << csv_field(r.source_label) << ',' << r.pairs
       << ',' << num(r.chrf) << ',' << num(r.meteor) << ','
       << (r.embedding_cosine ? num(*r.embedding_cosine) : "") << ','
       << (r.bertscore_f1 ? num(*r.bertscore_f1) : "") << '\n';
  }
  return os.str();
}

}  // namespace coex::metrics
