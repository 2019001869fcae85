#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coex::metrics {

using Embedding = std::vector<double>;

/// Source of text and token embeddings. Pretrained sentence encoders plug in
/// by implementing this; the library itself only ships HashingEmbedder.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual Embedding embed_text(std::string_view text) = 0;
  /// One vector per word token of `text`.
  virtual std::vector<Embedding> embed_tokens(std::string_view text) = 0;
};

/// Deterministic feature-hashing embedder: each token contributes its whole
/// form plus boundary-marked character trigrams, hashed into `dimension`
/// non-negative buckets. Useful as a stand-in and in tests; scores are not
/// comparable to pretrained encoders.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256, std::uint64_t seed = 0x5eedULL);

  std::string name() const override;
  Embedding embed_text(std::string_view text) override;
  std::vector<Embedding> embed_tokens(std::string_view text) override;

 private:
  Embedding embed_token(std::string_view token) const;

  std::size_t dimension_;
  std::uint64_t seed_;
};

double cosine_similarity(const Embedding& a, const Embedding& b);

struct EmbeddingScores {
  double cosine = 0.0;
  double bertscore_f1 = 0.0;
};

/// Whole-text cosine and greedy token-matching F1 (BERTScore shape). Both are
/// clamped to [0, 1]. Throws Error(kValidation) if either text has no tokens;
/// provider exceptions propagate.
EmbeddingScores embedding_similarity(std::string_view candidate, std::string_view reference,
                                     EmbeddingProvider& provider);

}  // namespace coex::metrics
