#include <benchmark/benchmark.h>

#include <string>

#include "coex/review/analytics.hpp"
#include "coex/segmenter.hpp"

namespace {

using coex::review::AuthoringEvent;
using coex::review::EventKind;

std::string java_source(int lines) {
  std::string s = "public class Big {\n  public static void main(String[] args) {\n";
  for (int i = 0; i < lines; ++i) {
    s += i % 7 == 0 ? "    // step\n" : i % 5 == 0 ? "    }\n" : "    total += values[" + std::to_string(i) + "];\n";
  }
  return s + "  }\n}";
}

void BM_SegmentJava(benchmark::State& state) {
  const auto src = java_source(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(coex::segment::segment_source(src, coex::Language::kJava));
}
BENCHMARK(BM_SegmentJava)->Arg(50)->Arg(1000);

/// One applied session of `per_session` fragments, each edited once.
std::vector<AuthoringEvent> synthetic_log(int sessions, int per_session) {
  std::vector<AuthoringEvent> log;
  std::int64_t seq = 0, ts = 1'700'000'000'000;
  auto push = [&](std::string author, std::string ex, EventKind kind, nlohmann::json payload) {
    AuthoringEvent e;
    e.sequence = ++seq;
    e.timestamp = ++ts;
    e.author_id = std::move(author);
    e.example_id = std::move(ex);
    e.kind = kind;
    e.payload = std::move(payload);
    log.push_back(std::move(e));
  };
  int frag = 0;
  for (int s = 0; s < sessions; ++s) {
    const std::string author = "A" + std::to_string(s % 5);
    const std::string ex = "ex-" + std::to_string(s);
    push(author, ex, EventKind::kExampleCreated,
         {{"title", "t"}, {"language", "java"}, {"lines", 10}, {"explainable_lines", 8}, {"fragments", 0},
          {"via", "create"}, {"example_version", 1}});
    push(author, ex, EventKind::kDialogOpened, {{"session_id", "s-" + std::to_string(s)}, {"resumed", false}});
    push(author, ex, EventKind::kGenerated,
         {{"session_id", "s-" + std::to_string(s)}, {"candidates", per_session}, {"lines", per_session / 2},
          {"parse_failed", false}});
    nlohmann::json frags = nlohmann::json::array();
    std::vector<std::string> ids;
    for (int i = 0; i < per_session; ++i) {
      ids.push_back("fr-" + std::to_string(++frag));
      frags.push_back({{"fragment_id", ids.back()}, {"line", 1 + i / 2}, {"text", "Adds the value to the sum."}, {"liked", false}});
    }
    push(author, ex, EventKind::kExplanationsUsed,
         {{"session_id", "s-" + std::to_string(s)}, {"candidates", per_session}, {"candidate_lines", per_session / 2},
          {"excluded", 0}, {"liked", 0}, {"lines_fully_excluded", 0}, {"fragments", frags}, {"example_version", 2}});
    for (const auto& id : ids) {
      push(author, ex, EventKind::kFragmentEdited,
           {{"fragment_id", id}, {"line", 1}, {"origin", "generated"}, {"text", "Adds each value to the total."},
            {"changed", true}, {"edit_count", 1}, {"example_version", 3}});
    }
  }
  return log;
}

void BM_Analyze(benchmark::State& state) {
  const auto log = synthetic_log(static_cast<int>(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(coex::review::analyze(log));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * log.size()));
}
BENCHMARK(BM_Analyze)->Arg(13)->Arg(1000);

}  // namespace
