#include "coex/metrics/similarity.hpp"

#include <string>
#include <unordered_map>
#include <vector>

#include "coex/error.hpp"
#include "coex/metrics/text.hpp"
#include "metrics/utf8.hpp"

namespace coex::metrics {
namespace {

std::u32string strip_whitespace(std::string_view text) {
  std::u32string out;
  for (char32_t c : detail::decode_utf8(text)) {
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
        c == 0x00A0) {
      continue;
    }
    out.push_back(c);
  }
  return out;
}

std::unordered_map<std::u32string, std::size_t> ngrams(const std::u32string& s, std::size_t n) {
  std::unordered_map<std::u32string, std::size_t> counts;
  if (s.size() < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

}  // namespace

double chrf(std::string_view candidate, std::string_view reference, int max_n, double beta) {
  if (max_n < 1) throw_validation("chrF order must be >= 1");
  const std::u32string ref = strip_whitespace(reference);
  if (ref.empty()) throw_validation("chrF reference must not be empty");
  const std::u32string cand = strip_whitespace(candidate);

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (ref.size() < un) continue;
    auto ref_counts = ngrams(ref, un);
    auto cand_counts = ngrams(cand, un);
    const double ref_total = static_cast<double>(ref.size() - un + 1);
    const double cand_total = cand.size() >= un ? static_cast<double>(cand.size() - un + 1) : 0.0;
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    precision_sum += cand_total > 0 ? static_cast<double>(matched) / cand_total : 0.0;
    recall_sum += static_cast<double>(matched) / ref_total;
    ++orders;
  }
  const double p = precision_sum / orders;
  const double r = recall_sum / orders;
  const double b2 = beta * beta;
  if (p + r == 0.0) return 0.0;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

MeteorBreakdown meteor_exact_breakdown(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize(candidate).tokens;
  const auto ref = tokenize(reference).tokens;
  MeteorBreakdown out;
  if (cand.empty() || ref.empty()) return out;

  std::vector<bool> used(ref.size(), false);
  // alignment[i] = matched reference index for candidate token i, or -1
  std::vector<long> alignment(cand.size(), -1);
  for (std::size_t i = 0; i < cand.size(); ++i) {
    long chosen = -1;
    if (i > 0 && alignment[i - 1] >= 0) {
      auto next = static_cast<std::size_t>(alignment[i - 1] + 1);
      if (next < ref.size() && !used[next] && ref[next] == cand[i]) chosen = static_cast<long>(next);
    }
    if (chosen < 0) {
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!used[j] && ref[j] == cand[i]) {
          chosen = static_cast<long>(j);
          break;
        }
      }
    }
    if (chosen >= 0) {
      used[static_cast<std::size_t>(chosen)] = true;
      alignment[i] = chosen;
      ++out.matches;
    }
  }
  if (out.matches == 0) return out;

  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (alignment[i] < 0) continue;
    bool continues = i > 0 && alignment[i - 1] >= 0 && alignment[i] == alignment[i - 1] + 1;
    if (!continues) ++out.chunks;
  }

  const double m = static_cast<double>(out.matches);
  out.precision = m / static_cast<double>(cand.size());
  out.recall = m / static_cast<double>(ref.size());
  out.fmean = 10.0 * out.precision * out.recall / (out.recall + 9.0 * out.precision);
  const double frag = static_cast<double>(out.chunks) / m;
  out.penalty = 0.5 * frag * frag * frag;
  out.score = out.fmean * (1.0 - out.penalty);
  return out;
}

}  // namespace coex::metrics
