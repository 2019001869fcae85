#pragma once

#include <cstddef>
#include <string_view>

namespace coex::metrics {

/// How a distance is normalised into a similarity ratio.
enum class RatioConvention {
  /// 1 - d / max(|a|, |b|) with unit-cost substitutions. Default.
  kMaxLength,
  /// (|a| + |b| - d') / (|a| + |b|) where d' charges 2 per substitution
  /// (the python-Levenshtein `ratio` convention).
  kLengthSum,
};

/// Unit-cost edit distance over Unicode code points.
std::size_t levenshtein_distance(std::string_view a, std::string_view b);

/// Similarity in [0, 1]; 1 exactly when a == b. ratio("", "") == 1.
double levenshtein_ratio(std::string_view a, std::string_view b,
                         RatioConvention convention = RatioConvention::kMaxLength);

}  // namespace coex::metrics
