// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <cmath>
#include <cstdio>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "coex/error.hpp"
#include "coex/metrics/levenshtein.hpp"
#include "coex/metrics/similarity.hpp"
#include "coex/metrics/text.hpp"
#include "coex/review/analytics.hpp"
#include "coex/service/http_api.hpp"
#include "coex/service/store.hpp"
#include "oracles.hpp"
#include "paper_fixture.hpp"
#include "properties.hpp"

using namespace coex;
using namespace coex::testing;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct Check {
  std::ostringstream detail;
  bool ok = true;

  template <class T>
  void expect(bool cond, const std::string& what, const T& got) {
    if (!cond) {
      ok = false;
      detail << what << "=" << got << " ";
    }
  }
  void fail(const std::string& why) {
    ok = false;
    detail << why << " ";
  }
};

int failures = 0;

void report(const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.fail(std::string("exception: ") + e.what());
  }
  if (!c.ok) ++failures;
  std::printf("%s %s%s%s\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.str().empty() ? "" : " | ",
              c.detail.str().c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------- fixtures

review::AuthoringReport table4_report(double* analyze_s = nullptr) {
  ServiceFixture fx("coex-acc-t4");
  build_table4_log(fx);
  const auto events = fx.service->events();
  const auto t0 = Clock::now();
  auto report = review::analyze(events);
  if (analyze_s) *analyze_s = seconds_since(t0);
  return report;
}

void table4(Check& c) {
  double took = 0;
  const auto r = table4_report(&took);
  const auto& t = r.total;
  c.expect(t.generated == 237, "generated", t.generated);
  c.expect(t.lines_explained == 99, "lines", t.lines_explained);
  c.expect(t.excluded == 24, "excluded", t.excluded);
  c.expect(near(t.excluded_pct, 10.12, 0.01), "excluded_pct", t.excluded_pct);
  c.expect(t.liked == 15, "liked", t.liked);
  c.expect(near(t.liked_pct, 6.32, 0.01), "liked_pct", t.liked_pct);
  c.expect(t.edited == 66, "edited", t.edited);
  c.expect(t.removed == 23, "removed", t.removed);
  c.expect(t.examples_created == 12, "examples", t.examples_created);
  c.expect(t.lines_fully_excluded == 0, "lines_fully_excluded", t.lines_fully_excluded);
  for (const auto& col : table4_columns()) {
    auto it = r.authors.find(col.author);
    if (it == r.authors.end()) {
      c.fail("missing author " + col.author);
      continue;
    }
    const auto& a = it->second;
    const bool same = a.examples_created == static_cast<std::size_t>(col.examples) &&
                      a.generated == static_cast<std::size_t>(col.generated) &&
                      a.lines_explained == static_cast<std::size_t>(col.lines) &&
                      a.excluded == static_cast<std::size_t>(col.excluded) &&
                      a.liked == static_cast<std::size_t>(col.liked) &&
                      a.edited == static_cast<std::size_t>(col.edited) &&
                      a.removed == static_cast<std::size_t>(col.removed);
    c.expect(same, "column", col.author);
  }
  c.expect(took < 1.0, "analyze_s", took);
  c.detail << "generated=" << t.generated << " lines=" << t.lines_explained << " excluded=" << t.excluded
           << " (" << t.excluded_pct << "%) liked=" << t.liked << " (" << t.liked_pct << "%) edited=" << t.edited
           << " (" << t.edited_pct << "%) removed=" << t.removed << " (" << t.removed_pct
           << "%) examples=" << t.examples_created << " analyze=" << took << "s";
}

void table5(Check& c) {
  const std::vector<std::pair<std::string, double>> want = {
      {"A1", 0.435}, {"A2", 1.0}, {"A3", 0.833}, {"A4", 1.0}, {"A5", 0.412}};
  {
    ServiceFixture fx("coex-acc-t5");
    build_table5_log(fx);
    const auto r = fx.service->authoring_report();
    for (const auto& [author, ratio] : want) {
      auto it = r.authors.find(author);
      const double got = it == r.authors.end() ? -1.0 : it->second.avg_levenshtein_ratio.value_or(-1.0);
      c.expect(near(got, ratio, 1e-9), "ratio_" + author, got);
    }
    c.expect(near(r.avg_levenshtein_ratio, 0.736, 0.0005), "average", r.avg_levenshtein_ratio);
    c.detail << "average=" << r.avg_levenshtein_ratio << " ";
  }
  {
    ServiceFixture fx("coex-acc-t5-untouched");
    build_table5_log(fx, false);
    const auto r = fx.service->authoring_report();
    c.expect(r.avg_levenshtein_ratio == 1.0, "zero_edit_ratio", r.avg_levenshtein_ratio);
    c.detail << "zero_edit_ratio=" << r.avg_levenshtein_ratio;
  }
}

void edit_stats(Check& c) {
  const auto t = table4_report().total;
  c.expect(t.edited == 66, "edited", t.edited);
  c.expect(t.edit_events == 93, "edit_events", t.edit_events);
  c.expect(near(t.avg_edits_per_edited_fragment, 1.41, 0.02), "mean", t.avg_edits_per_edited_fragment);
  c.expect(std::isfinite(t.stdev_edits_per_edited_fragment) && t.stdev_edits_per_edited_fragment > 0, "stdev",
           t.stdev_edits_per_edited_fragment);
  c.detail << "mean=" << t.avg_edits_per_edited_fragment << " stdev=" << t.stdev_edits_per_edited_fragment;
}

void fragments_per_line(Check& c) {
  const auto t = table4_report().total;
  c.expect(t.candidates_total == 269, "candidates", t.candidates_total);
  c.expect(t.candidate_lines_total == 119, "lines", t.candidate_lines_total);
  c.expect(near(t.avg_fragments_per_line, 2.26, 0.005), "mean", t.avg_fragments_per_line);
  c.detail << "mean=" << t.avg_fragments_per_line;
}

void metric_oracles(Check& c) {
  const auto t0 = Clock::now();
  Rng rng(2024);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string a = rng.string_from("abcd", 0, 8), b = rng.string_from("abcd", 0, 8);
    if (metrics::levenshtein_distance(a, b) != brute_levenshtein(a, b)) ++mismatches;
  }
  c.expect(mismatches == 0, "levenshtein_mismatches", mismatches);

  const double chrf = metrics::chrf("ab", "abc", 2);
  c.expect(near(chrf, 35.0 / 55.0, 1e-9), "chrf_ab_abc", chrf);
  const double m1 = metrics::meteor_exact("the cat", "the cat");
  c.expect(near(m1, 0.9375, 1e-9), "meteor_same", m1);
  const double m2 = metrics::meteor_exact("cat the", "the cat");
  c.expect(near(m2, 0.5, 1e-9), "meteor_swapped", m2);

  const auto r = metrics::readability(metrics::tokenize("The cat sat."));
  c.expect(near(r.flesch_reading_ease, fre_from_counts(3, 1, 3), 1e-9), "fre", r.flesch_reading_ease);
  c.expect(near(r.flesch_kincaid, fk_from_counts(3, 1, 3), 1e-9), "fk", r.flesch_kincaid);
  c.expect(near(r.gunning_fog, gf_from_counts(3, 1, 0), 1e-9), "gf", r.gunning_fog);
  c.expect(near(r.flesch_reading_ease, 119.19, 0.005) && near(r.flesch_kincaid, -2.62, 0.005) &&
               near(r.gunning_fog, 1.2, 0.005),
           "readability_2dp", r.flesch_reading_ease);

  Rng prop(7);
  if (auto e = check_levenshtein(prop, 10000)) c.fail("levenshtein property: " + *e);
  if (auto e = check_text_metrics(prop, 10000)) c.fail("text metric property: " + *e);
  const double took = seconds_since(t0);
  c.expect(took < 30.0, "runtime_s", took);
  c.detail << "1000 brute pairs, 20000 property cases, " << took << "s";
}

void state_machines(Check& c) {
  const auto t0 = Clock::now();
  Rng rng(99);
  if (auto e = check_example_state_machine(rng, 5000, 40)) c.fail("example: " + *e);
  if (auto e = check_session_state_machine(rng, 5000, 40)) c.fail("session: " + *e);
  c.detail << "10000 sequences, " << seconds_since(t0) << "s";
}

// ---------------------------------------------------------------- crash injection

struct Crash {
  std::string point;
  bool armed = false;
  bool fired = false;
};

std::unique_ptr<service::AuthoringService> open_store(const std::filesystem::path& dir, ManualClock& clock,
                                                      Crash* crash) {
  service::ServiceOptions o;
  llm::MockProvider::Options mock;
  mock.seed = 5;
  o.provider = std::make_shared<llm::MockProvider>(mock);
  o.clock = clock.as_clock();
  o.ids = std::make_shared<IdGenerator>(13);
  o.sleeper = [](std::chrono::milliseconds) {};
  o.durable = false;
  if (crash) {
    o.fault_hook = [crash](std::string_view p) {
      if (crash->armed && !crash->fired && p == crash->point) {
        crash->fired = true;
        throw service::InjectedFault(std::string(p));
      }
    };
  }
  return std::make_unique<service::AuthoringService>(dir, std::move(o));
}

/// Runs `op` with a crash at `point`, reopens the store and checks that the
/// example is either exactly the old state or exactly what `op` produced.
std::string crash_case(const std::string& point, int op, int& fired) {
  TempDir dir("coex-acc-crash");
  ManualClock clock(1'700'000'000'000, 1);
  Crash crash{point};
  std::string id, sid;
  ExampleData old_state;
  std::int64_t old_session_version = 0;
  {
    auto svc = open_store(dir.path(), clock, &crash);
    auto ex = svc->create_example("a", {"T", "P", Language::kJava, "int a = 1;\nint b = a;\n}"});
    ex = svc->add_fragment("a", ex.id(), ex.version(), 1, "First.");
    id = ex.id();
    auto opened = svc->open_dialog("a", id);
    sid = opened.session.id();
    auto s = opened.session;
    if (op == 2) s = svc->generate("a", sid, s.version(), {});
    old_state = svc->get_example(id).data();
    old_session_version = s.version();
    crash.armed = true;
    try {
      switch (op) {
        case 0: svc->edit_fragment("a", id, ex.version(), ex.line(1).fragments[0].id, "Changed."); break;
        case 1: svc->delete_example("a", id, ex.version()); break;
        case 2: svc->apply("a", sid, s.version()); break;
        case 3: svc->generate("a", sid, s.version(), {}); break;
        default: svc->create_example("a", {"U", "P", Language::kJava, "int c = 2;"}); break;
      }
    } catch (const service::InjectedFault&) {
    }
    fired += crash.fired ? 1 : 0;
  }
  std::unique_ptr<service::AuthoringService> svc;
  try {
    svc = open_store(dir.path(), clock, nullptr);
  } catch (const std::exception& e) {
    return "reload failed: " + std::string(e.what());
  }
  std::optional<ExampleData> now;
  try {
    now = svc->get_example(id).data();
  } catch (const Error&) {
  }
  const auto events = svc->events();
  const bool logged_delete =
      std::any_of(events.begin(), events.end(), [](const auto& e) { return e.kind == review::EventKind::kExampleDeleted; });
  switch (op) {
    case 0:
      if (!now) return "example vanished";
      if (!(*now == old_state) && !(now->version == old_state.version + 1 && now->lines[0].fragments[0].text == "Changed.")) {
        return "edit left a mixed state";
      }
      if ((now->version == old_state.version + 1) != (events.back().kind == review::EventKind::kFragmentEdited)) {
        return "edit event and document disagree";
      }
      break;
    case 1:
      if (now && !(*now == old_state)) return "delete left a mixed state";
      if (now.has_value() == logged_delete) return "delete event and document disagree";
      break;
    case 2: {
      if (!now) return "example vanished";
      const auto session = svc->session(sid);
      const bool applied = session.state() == review::SessionState::kApplied;
      auto count = [](const ExampleData& d) {
        std::size_t n = 0;
        for (const auto& l : d.lines) n += l.fragments.size();
        return n;
      };
      if (applied) {
        if (now->version <= old_state.version || count(*now) <= count(old_state)) {
          return "applied session but example not updated";
        }
      } else if (!(*now == old_state) || session.version() != old_session_version) {
        return "unapplied session but example or session changed";
      }
      break;
    }
    case 3: {
      if (!now || !(*now == old_state)) return "generation changed the example";
      const auto session = svc->session(sid);
      if (session.batch().has_value() != (session.version() == old_session_version + 1)) {
        return "generation event and session disagree";
      }
      break;
    }
    default: {
      if (!now || !(*now == old_state)) return "unrelated example changed";
      const auto all = svc->list_examples();
      const bool created = all.size() == 2;
      const bool logged = events.back().kind == review::EventKind::kExampleCreated && events.size() > 1 &&
                          events.back().example_id != id;
      if (created != logged) return "create event and document disagree";
    }
  }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".tmp") || name.ends_with(".pending.json")) return "leftover file " + name;
  }
  return {};
}

void round_trip(Check& c) {
  Rng rng(31337);
  if (auto e = check_portable_round_trip(rng, 50)) c.fail("portable: " + *e);
  const std::vector<std::string> points = {"example.tmp_written", "batch.tmp_written",   "example.staged",
                                           "event.before_write",  "event.partial",       "example.before_commit",
                                           "example.before_remove"};
  int cases = 0, fired = 0;
  for (const auto& p : points) {
    for (int op = 0; op < 5; ++op) {
      ++cases;
      const std::string err = crash_case(p, op, fired);
      if (!err.empty()) c.fail(p + " op" + std::to_string(op) + ": " + err);
    }
  }
  c.expect(fired >= cases / 2, "faults_fired", fired);
  c.detail << "50 round trips, " << cases << " crash cases (" << fired << " hit their fault point)";
}

// ---------------------------------------------------------------- end to end

void end_to_end(Check& c) {
  const auto t0 = Clock::now();
  TempDir dir("coex-acc-e2e");
  service::ServiceOptions o;
  o.provider = std::make_shared<llm::MockProvider>();
  o.durable = true;
  service::AuthoringService svc(dir.path(), std::move(o));
  service::HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  if (port <= 0) {
    c.fail("bind failed");
    return;
  }
  std::thread th([&] { server.listen(); });
  server.wait_until_ready();
  struct Stop {
    service::HttpServer& s;
    std::thread& t;
    ~Stop() {
      s.stop();
      t.join();
    }
  } stop{server, th};

  httplib::Client cli("127.0.0.1", port);
  const std::string source =
      "public class Sum {\n  public static void main(String[] args) {\n    int total = 0;\n"
      "    for (int i = 1; i <= 10; i++) {\n      total += i;\n    }\n    System.out.println(total);\n  }\n}";
  auto r = cli.Post("/api/examples",
                    json{{"title", "Sum"}, {"problem", "Sum 1..10."}, {"language", "java"}, {"source", source}}.dump(),
                    "application/json");
  if (!r || r->status != 201) {
    c.fail("create failed");
    return;
  }
  const std::string id = json::parse(r->body)["id"];
  r = cli.Post(("/api/examples/" + id + "/sessions").c_str(), "", "application/json");
  const std::string sid = json::parse(r->body)["id"];
  const std::string ses = "/api/sessions/" + sid;
  r = cli.Post((ses + "/generate").c_str(), {{"If-Match", r->get_header_value("ETag")}}, "{}", "application/json");
  if (!r || r->status != 200) {
    c.fail("generate failed");
    return;
  }
  const json batch = json::parse(r->body)["batch"];
  const auto& lines = batch["lines"];
  if (lines.size() < 2 || lines[0]["fragments"].size() < 2) {
    c.fail("mock batch too small");
    return;
  }
  const int excl_line = lines[0]["line"], like_line = lines[1]["line"];
  const std::string excl_text = lines[0]["fragments"][1]["text"];
  const std::string like_text = lines[1]["fragments"][0]["text"];
  r = cli.Put((ses + "/lines/" + std::to_string(excl_line) + "/fragments/1/include").c_str(),
              {{"If-Match", r->get_header_value("ETag")}}, json{{"included", false}}.dump(), "application/json");
  r = cli.Post((ses + "/lines/" + std::to_string(like_line) + "/fragments/0/like").c_str(),
               {{"If-Match", r->get_header_value("ETag")}}, "", "application/json");
  r = cli.Post((ses + "/apply").c_str(), {{"If-Match", r->get_header_value("ETag")}}, "", "application/json");
  if (!r || r->status != 200) {
    c.fail("apply failed");
    return;
  }
  const std::size_t candidates = batch["candidates"];
  const json result = json::parse(r->body)["result"];
  c.expect(result["applied"] == candidates - 1, "applied", result["applied"]);
  c.expect(result["excluded"] == 1 && result["liked"] == 1, "marks", result.dump());

  r = cli.Get(("/api/examples/" + id + "/export").c_str());
  const json doc = json::parse(r->body);
  std::size_t exported = 0, liked = 0;
  for (const auto& line : doc["lines"]) {
    const int n = line["number"];
    std::vector<std::string> want;
    for (const auto& bl : lines) {
      if (bl["line"] == n) {
        for (const auto& f : bl["fragments"]) {
          if (!(n == excl_line && f["text"] == excl_text)) want.push_back(f["text"]);
        }
      }
    }
    std::vector<std::string> got;
    for (const auto& f : line["fragments"]) {
      got.push_back(f["text"]);
      ++exported;
      const bool should_like = n == like_line && f["text"] == like_text;
      if (f["liked"] != should_like) c.fail("like mark wrong on line " + std::to_string(n));
      if (f["liked"] == true) ++liked;
      if (f["origin"] != "generated" || f["original_text"] != f["text"]) c.fail("provenance wrong");
    }
    if (got != want) c.fail("fragments differ on line " + std::to_string(n));
  }
  c.expect(exported == candidates - 1, "exported", exported);
  c.expect(liked == 1, "liked", liked);
  r = cli.Get(("/api/examples/" + id + "/export?format=pcex").c_str());
  c.expect(r && r->status == 200, "pcex_status", r ? r->status : -1);
  const double took = seconds_since(t0);
  c.expect(took < 5.0, "runtime_s", took);
  c.detail << candidates << " candidates, " << exported << " exported, " << took << "s";
}

}  // namespace

int main() {
  report("table4-fixture", table4);
  report("table5-arithmetic", table5);
  report("edit-statistics", edit_stats);
  report("fragments-per-line", fragments_per_line);
  report("metric-oracles", metric_oracles);
  report("state-machine-properties", state_machines);
  report("round-trip-and-crash-recovery", round_trip);
  report("end-to-end-http-mock", end_to_end);
  return failures == 0 ? 0 : 1;
}
