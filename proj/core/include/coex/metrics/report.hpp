#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coex/metrics/embedding.hpp"
#include "coex/metrics/text.hpp"

namespace coex::metrics {

struct DocumentGroup {
  std::string label;
  std::vector<std::string> documents;
};

struct DocumentMetrics {
  double vocabulary = 0.0;
  double lexical_density = 0.0;
  double tokens = 0.0;
  double gunning_fog = 0.0;
  double flesch_reading_ease = 0.0;
  double flesch_kincaid = 0.0;
};

DocumentMetrics document_metrics(std::string_view document, const StopwordList& stopwords);

/// Median with the mean-of-middle-two rule for even counts. Throws on empty.
double median(std::vector<double> values);

struct MetricsRow {
  std::string source_label;
  std::size_t n_documents = 0;
  DocumentMetrics medians;
};

/// Per-document metrics, then per-group medians. Throws Error(kValidation)
/// for an empty group, a duplicate label, or a document without words.
std::vector<MetricsRow> median_report(const std::vector<DocumentGroup>& groups,
                                      const StopwordList& stopwords);

struct SimilarityRow {
  std::string reference_label;
  std::string source_label;
  std::size_t pairs = 0;  // document pairs averaged
  double chrf = 0.0;
  double meteor = 0.0;
  std::optional<double> embedding_cosine;
  std::optional<double> bertscore_f1;
};

/// One row per ordered pair of distinct groups; each score is the mean over
/// all (reference document, source document) pairs. Embedding columns are
/// filled only when a provider is given.
std::vector<SimilarityRow> similarity_report(const std::vector<DocumentGroup>& groups,
                                             EmbeddingProvider* provider = nullptr);

struct CorpusReport {
  std::string tokenizer_version;
  std::string stopwords_version;
  std::string stopwords_digest;
  std::optional<std::string> embedding_provider;
  std::vector<MetricsRow> lexical;
  std::vector<SimilarityRow> similarity;
};

CorpusReport corpus_report(const std::vector<DocumentGroup>& groups,
                           const StopwordList& stopwords, EmbeddingProvider* provider = nullptr);

nlohmann::json to_json(const CorpusReport& report);

/// Two CSV tables (lexical, then similarity) separated by a blank line.
std::string to_csv(const CorpusReport& report);

}  // namespace coex::metrics
