#include "coex/metrics/levenshtein.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "metrics/utf8.hpp"

namespace coex::metrics {
namespace {

// Single-row Wagner-Fischer.
std::size_t edit_distance(const std::u32string& a, const std::u32string& b,
                          std::size_t substitution_cost) {
  const std::u32string& s = a.size() < b.size() ? b : a;
  const std::u32string& t = a.size() < b.size() ? a : b;
  std::vector<std::size_t> row(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      std::size_t above = row[j];
      std::size_t cost = s[i - 1] == t[j - 1] ? 0 : substitution_cost;
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + cost});
      diagonal = above;
    }
  }
  return row[t.size()];
}

}  // namespace

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
  if (a == b) return 0;
  return edit_distance(detail::decode_utf8(a), detail::decode_utf8(b), 1);
}

double levenshtein_ratio(std::string_view a, std::string_view b, RatioConvention convention) {
  if (a == b) return 1.0;
  auto ua = detail::decode_utf8(a);
  auto ub = detail::decode_utf8(b);
  if (convention == RatioConvention::kLengthSum) {
    const double total = static_cast<double>(ua.size() + ub.size());
    return (total - static_cast<double>(edit_distance(ua, ub, 2))) / total;
  }
  const double longest = static_cast<double>(std::max(ua.size(), ub.size()));
  return 1.0 - static_cast<double>(edit_distance(ua, ub, 1)) / longest;
}

}  // namespace coex::metrics
