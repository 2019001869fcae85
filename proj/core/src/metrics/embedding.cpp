#include "coex/metrics/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "coex/error.hpp"
#include "coex/metrics/text.hpp"

namespace coex::metrics {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw_validation("embedding dimension must be positive");
}

std::string HashingEmbedder::name() const {
  return "hashing-" + std::to_string(dimension_) + "-" + std::to_string(seed_);
}

Embedding HashingEmbedder::embed_token(std::string_view token) const {
  Embedding v(dimension_, 0.0);
  auto add = [&](std::string_view feature, double weight) {
    v[mix(fnv1a(feature) ^ seed_) % dimension_] += weight;
  };
  add(token, 1.0);
  const std::string marked = "#" + std::string(token) + "#";
  for (std::size_t i = 0; i + 3 <= marked.size(); ++i) add(std::string_view(marked).substr(i, 3), 0.5);
  return v;
}

Embedding HashingEmbedder::embed_text(std::string_view text) {
  Embedding sum(dimension_, 0.0);
  for (const auto& token : tokenize(text).tokens) {
    Embedding v = embed_token(token);
    for (std::size_t i = 0; i < dimension_; ++i) sum[i] += v[i];
  }
  return sum;
}

std::vector<Embedding> HashingEmbedder::embed_tokens(std::string_view text) {
  std::vector<Embedding> out;
  for (const auto& token : tokenize(text).tokens) out.push_back(embed_token(token));
  return out;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw_validation("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbeddingScores embedding_similarity(std::string_view candidate, std::string_view reference,
                                     EmbeddingProvider& provider) {
  auto cand_tokens = provider.embed_tokens(candidate);
  auto ref_tokens = provider.embed_tokens(reference);
  if (cand_tokens.empty() || ref_tokens.empty()) {
    throw_validation("embedding similarity needs non-empty candidate and reference");
  }
  EmbeddingScores scores;
  if (candidate == reference) {
    scores.cosine = 1.0;
    scores.bertscore_f1 = 1.0;
    return scores;
  }
  scores.cosine = clamp01(cosine_similarity(provider.embed_text(candidate),
                                            provider.embed_text(reference)));

  std::vector<std::vector<double>> sim(cand_tokens.size(), std::vector<double>(ref_tokens.size()));
  for (std::size_t i = 0; i < cand_tokens.size(); ++i) {
    for (std::size_t j = 0; j < ref_tokens.size(); ++j) {
      sim[i][j] = cosine_similarity(cand_tokens[i], ref_tokens[j]);
    }
  }
  double precision = 0.0;
  for (std::size_t i = 0; i < cand_tokens.size(); ++i) {
    precision += *std::max_element(sim[i].begin(), sim[i].end());
  }
  precision /= static_cast<double>(cand_tokens.size());
  double recall = 0.0;
  for (std::size_t j = 0; j < ref_tokens.size(); ++j) {
    double best = sim[0][j];
    for (std::size_t i = 1; i < cand_tokens.size(); ++i) best = std::max(best, sim[i][j]);
    recall += best;
  }
  recall /= static_cast<double>(ref_tokens.size());
  scores.bertscore_f1 =
      precision + recall > 0.0 ? clamp01(2.0 * precision * recall / (precision + recall)) : 0.0;
  return scores;
}

}  // namespace coex::metrics
