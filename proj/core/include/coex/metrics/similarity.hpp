#pragma once

#include <cstddef>
#include <string_view>

namespace coex::metrics {

/// Character n-gram F-score. Whitespace is removed before n-gramming;
/// precision and recall are averaged over orders 1..max_n, skipping orders
/// for which the reference has no n-grams. Throws Error(kValidation) for an
/// empty reference.
double chrf(std::string_view candidate, std::string_view reference, int max_n = 6,
            double beta = 2.0);

struct MeteorBreakdown {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

/// METEOR restricted to the exact-match stage over lowercased word tokens.
/// Alignment is greedy left to right, preferring the reference position that
/// extends the current chunk.
MeteorBreakdown meteor_exact_breakdown(std::string_view candidate, std::string_view reference);

inline double meteor_exact(std::string_view candidate, std::string_view reference) {
  return meteor_exact_breakdown(candidate, reference).score;
}

}  // namespace coex::metrics
