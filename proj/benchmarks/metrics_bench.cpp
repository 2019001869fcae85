#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "coex/metrics/levenshtein.hpp"
#include "coex/metrics/similarity.hpp"
#include "coex/metrics/text.hpp"

namespace {

std::string words(std::size_t n, unsigned seed) {
  static const char* vocab[] = {"the", "loop", "adds", "each", "value", "to", "sum", "prints", "result"};
  std::mt19937 rng(seed);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += vocab[rng() % 9];
  }
  return s + ".";
}

void BM_Levenshtein(benchmark::State& state) {
  const auto a = words(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = words(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(coex::metrics::levenshtein_distance(a, b));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * (a.size() + b.size())));
}
BENCHMARK(BM_Levenshtein)->Arg(4)->Arg(16)->Arg(64);

void BM_Chrf(benchmark::State& state) {
  const auto a = words(static_cast<std::size_t>(state.range(0)), 3);
  const auto b = words(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(coex::metrics::chrf(a, b));
}
BENCHMARK(BM_Chrf)->Arg(16)->Arg(128);

void BM_Meteor(benchmark::State& state) {
  const auto a = words(static_cast<std::size_t>(state.range(0)), 5);
  const auto b = words(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(coex::metrics::meteor_exact(a, b));
}
BENCHMARK(BM_Meteor)->Arg(16)->Arg(128);

void BM_Readability(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < state.range(0); ++i) text += words(12, static_cast<unsigned>(i)) + " ";
  for (auto _ : state) benchmark::DoNotOptimize(coex::metrics::readability(coex::metrics::tokenize(text)));
}
BENCHMARK(BM_Readability)->Arg(10)->Arg(100);

}  // namespace
