#include "coex/review/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "coex/error.hpp"
#include "coex/metrics/levenshtein.hpp"
#include "coex/review/event_log.hpp"

namespace coex::review {
namespace {

struct FragmentTrack {
  std::string owner;
  bool generated = false;
  std::optional<std::string> original;
  std::string current;
  bool alive = true;
  std::size_t edits = 0;
};

using FragmentsByExample = std::map<std::string, std::map<std::string, FragmentTrack>>;

struct Fold {
  const AnalyzeOptions& options;
  std::vector<double> thresholds;
  std::map<std::string, AuthorStats> authors;
  FragmentsByExample fragments;
  std::map<std::pair<std::string, std::string>, TimestampMs> pending_close;

  AuthorStats& stats(const std::string& author) {
    auto [it, inserted] = authors.try_emplace(author);
    if (inserted) {
      for (double t : thresholds) it->second.close_reopen.push_back({t, 0});
    }
    return it->second;
  }

  FragmentTrack* lookup(const std::string& example, const std::string& fragment_id) {
    auto ex = fragments.find(example);
    if (ex == fragments.end()) return nullptr;
    auto it = ex->second.find(fragment_id);
    return it == ex->second.end() ? nullptr : &it->second;
  }

  void track(const std::string& example, const std::string& fragment_id, FragmentTrack t) {
    fragments[example][fragment_id] = std::move(t);
  }

  void apply(const AuthoringEvent& e) {
    const auto& p = e.payload;
    AuthorStats& s = stats(e.author_id);
    switch (e.kind) {
      case EventKind::kExampleCreated:
        ++s.examples_created;
        break;
      case EventKind::kExampleDeleted: {
        auto ex = fragments.find(e.example_id);
        if (ex != fragments.end()) {
          for (auto& [id, f] : ex->second) f.alive = false;
        }
        break;
      }
      case EventKind::kDialogOpened: {
        ++s.dialogs_opened;
        auto key = std::make_pair(e.author_id, e.example_id);
        auto it = pending_close.find(key);
        if (it != pending_close.end()) {
          const double interval_s = static_cast<double>(e.timestamp - it->second) / 1000.0;
          for (auto& bucket : s.close_reopen) {
            if (interval_s <= bucket.threshold_s) {
              ++bucket.count;
              ++s.close_reopen_total;
              break;
            }
          }
          pending_close.erase(it);
        }
        break;
      }
      case EventKind::kDialogClosed:
        pending_close[{e.author_id, e.example_id}] = e.timestamp;
        break;
      case EventKind::kGenerated:
        ++s.generations;
        s.candidates_total += p.at("candidates").get<std::size_t>();
        s.candidate_lines_total += p.at("lines").get<std::size_t>();
        break;
      case EventKind::kExplanationsUsed:
        ++s.sessions_applied;
        s.generated += p.at("candidates").get<std::size_t>();
        s.lines_explained += p.at("candidate_lines").get<std::size_t>();
        s.excluded += p.at("excluded").get<std::size_t>();
        s.liked += p.at("liked").get<std::size_t>();
        s.lines_fully_excluded += p.value("lines_fully_excluded", std::size_t{0});
        for (const auto& f : p.at("fragments")) {
          const auto text = f.at("text").get<std::string>();
          track(e.example_id, f.at("fragment_id").get<std::string>(),
                {e.author_id, true, text, text, true, 0});
        }
        break;
      case EventKind::kFragmentAdded: {
        const bool generated = p.at("origin").get<std::string>() == "generated";
        const auto text = p.at("text").get<std::string>();
        if (!generated) ++s.human_added;
        track(e.example_id, p.at("fragment_id").get<std::string>(),
              {e.author_id, generated, generated ? std::optional<std::string>(text) : std::nullopt,
               text, true, 0});
        break;
      }
      case EventKind::kFragmentEdited: {
        if (!p.value("changed", true)) break;
        const auto id = p.at("fragment_id").get<std::string>();
        FragmentTrack* f = lookup(e.example_id, id);
        if (!f) {
          // Fragment predates the log (imported example): count the edit,
          // but no original text is known for a ratio.
          track(e.example_id, id,
                {e.author_id, p.value("origin", std::string{}) == "generated", std::nullopt, "",
                 true, 0});
          f = lookup(e.example_id, id);
        }
        f->current = p.at("text").get<std::string>();
        if (f->generated) ++f->edits;
        break;
      }
      case EventKind::kFragmentRemoved: {
        const auto id = p.at("fragment_id").get<std::string>();
        FragmentTrack* f = lookup(e.example_id, id);
        const bool generated =
            f ? f->generated : p.value("origin", std::string{}) == "generated";
        AuthorStats& owner = stats(f ? f->owner : e.author_id);
        if (generated) {
          ++owner.removed;
        } else {
          ++owner.human_removed;
        }
        if (f) f->alive = false;
        break;
      }
      case EventKind::kFragmentsMerged: {
        // One event: the second fragment disappears (not a removal) and the
        // first absorbs its text, which counts as an edit of the first.
        ++s.merged;
        if (FragmentTrack* second = lookup(e.example_id, p.at("second_id").get<std::string>())) {
          second->alive = false;
        }
        const auto first_id = p.at("first_id").get<std::string>();
        FragmentTrack* first = lookup(e.example_id, first_id);
        if (!first) {
          track(e.example_id, first_id, {e.author_id, false, std::nullopt, "", true, 0});
          first = lookup(e.example_id, first_id);
        }
        if (p.value("origin", std::string{}) == "generated") {
          first->generated = true;
          if (!first->original && p.contains("original_text") && p["original_text"].is_string()) {
            first->original = p["original_text"].get<std::string>();
          }
        }
        first->current = p.at("text").get<std::string>();
        if (first->generated) ++first->edits;
        break;
      }
      case EventKind::kExported:
        ++s.exported;
        break;
      default:
        break;
    }
  }
};

void derive(AuthorStats& s, const std::vector<std::size_t>& edit_counts) {
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  s.avg_fragments_per_line = ratio(s.candidates_total, s.candidate_lines_total);
  s.avg_fragments_per_line_applied = ratio(s.generated, s.lines_explained);
  s.excluded_pct = 100.0 * ratio(s.excluded, s.generated);
  s.liked_pct = 100.0 * ratio(s.liked, s.generated);
  s.edited_pct = 100.0 * ratio(s.edited, s.generated);
  s.removed_pct = 100.0 * ratio(s.removed, s.generated);

  const std::size_t n = edit_counts.size();
  if (n == 0) return;
  double sum = 0.0;
  for (auto c : edit_counts) sum += static_cast<double>(c);
  const double mean = sum / static_cast<double>(n);
  s.avg_edits_per_edited_fragment = mean;
  if (n > 1) {
    double sq = 0.0;
    for (auto c : edit_counts) sq += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
    s.stdev_edits_per_edited_fragment = std::sqrt(sq / static_cast<double>(n - 1));
  }
}

void add_counts(AuthorStats& total, const AuthorStats& s) {
  total.examples_created += s.examples_created;
  total.dialogs_opened += s.dialogs_opened;
  total.generations += s.generations;
  total.sessions_applied += s.sessions_applied;
  total.candidates_total += s.candidates_total;
  total.candidate_lines_total += s.candidate_lines_total;
  total.generated += s.generated;
  total.lines_explained += s.lines_explained;
  total.excluded += s.excluded;
  total.liked += s.liked;
  total.lines_fully_excluded += s.lines_fully_excluded;
  total.edited += s.edited;
  total.edit_events += s.edit_events;
  total.removed += s.removed;
  total.merged += s.merged;
  total.human_added += s.human_added;
  total.human_removed += s.human_removed;
  total.exported += s.exported;
  total.close_reopen_total += s.close_reopen_total;
  for (std::size_t i = 0; i < s.close_reopen.size(); ++i) {
    total.close_reopen[i].count += s.close_reopen[i].count;
  }
  total.ratio_fragments += s.ratio_fragments;
}

nlohmann::json stats_json(const AuthorStats& s) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : s.close_reopen) {
    buckets.push_back({{"threshold_s", b.threshold_s}, {"count", b.count}});
  }
  nlohmann::json j = {{"examples_created", s.examples_created},
                      {"dialogs_opened", s.dialogs_opened},
                      {"generations", s.generations},
                      {"sessions_applied", s.sessions_applied},
                      {"candidates_total", s.candidates_total},
                      {"candidate_lines_total", s.candidate_lines_total},
                      {"generated", s.generated},
                      {"lines_explained", s.lines_explained},
                      {"excluded", s.excluded},
                      {"liked", s.liked},
                      {"lines_fully_excluded", s.lines_fully_excluded},
                      {"edited", s.edited},
                      {"edit_events", s.edit_events},
                      {"removed", s.removed},
                      {"merged", s.merged},
                      {"human_added", s.human_added},
                      {"human_removed", s.human_removed},
                      {"exported", s.exported},
                      {"close_reopen_pairs", buckets},
                      {"close_reopen_total", s.close_reopen_total},
                      {"avg_fragments_per_line", s.avg_fragments_per_line},
                      {"avg_fragments_per_line_applied", s.avg_fragments_per_line_applied},
                      {"excluded_pct", s.excluded_pct},
                      {"liked_pct", s.liked_pct},
                      {"edited_pct", s.edited_pct},
                      {"removed_pct", s.removed_pct},
                      {"avg_edits_per_edited_fragment", s.avg_edits_per_edited_fragment},
                      {"stdev_edits_per_edited_fragment", s.stdev_edits_per_edited_fragment},
                      {"avg_levenshtein_ratio", nullptr},
                      {"ratio_fragments", s.ratio_fragments}};
  if (s.avg_levenshtein_ratio) j["avg_levenshtein_ratio"] = *s.avg_levenshtein_ratio;
  return j;
}

}  // namespace

double aggregate_author_ratios(std::span<const double> author_means) {
  if (author_means.empty()) return 1.0;
  double sum = 0.0;
  for (double m : author_means) sum += m;
  return sum / static_cast<double>(author_means.size());
}

AuthoringReport analyze(std::span<const AuthoringEvent> log, const AnalyzeOptions& options) {
  verify_sequence(log);
  Fold fold{options, options.close_reopen_thresholds_s, {}, {}, {}};
  std::sort(fold.thresholds.begin(), fold.thresholds.end());
  for (const auto& e : log) {
    try {
      fold.apply(e);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::kIntegrity, "event " + std::to_string(e.sequence) + " (" +
                                             std::string(to_string(e.kind)) +
                                             ") has a malformed payload: " + ex.what());
    }
  }

  std::map<std::string, std::vector<std::size_t>> edit_counts;
  std::map<std::string, std::vector<double>> ratios;
  std::vector<std::size_t> all_edit_counts;
  std::vector<double> all_ratios;
  for (const auto& [example, frags] : fold.fragments) {
    for (const auto& [id, f] : frags) {
      if (!f.generated) continue;
      if (f.edits > 0) {
        edit_counts[f.owner].push_back(f.edits);
        all_edit_counts.push_back(f.edits);
      }
      if (f.alive && f.original) {
        const double r = metrics::levenshtein_ratio(*f.original, f.current);
        ratios[f.owner].push_back(r);
        all_ratios.push_back(r);
      }
    }
  }

  AuthoringReport report;
  report.events = log.size();
  report.thresholds_s = fold.thresholds;
  for (double t : fold.thresholds) report.total.close_reopen.push_back({t, 0});

  std::vector<double> author_means;
  for (auto& [author, s] : fold.authors) {
    const auto& counts = edit_counts[author];
    s.edited = counts.size();
    s.edit_events = 0;
    for (auto c : counts) s.edit_events += c;
    const auto& rs = ratios[author];
    s.ratio_fragments = rs.size();
    if (!rs.empty()) {
      double sum = 0.0;
      for (double r : rs) sum += r;
      s.avg_levenshtein_ratio = sum / static_cast<double>(rs.size());
      author_means.push_back(*s.avg_levenshtein_ratio);
    }
    derive(s, counts);
    add_counts(report.total, s);
  }
  derive(report.total, all_edit_counts);
  report.avg_levenshtein_ratio = aggregate_author_ratios(author_means);
  if (!all_ratios.empty()) {
    double sum = 0.0;
    for (double r : all_ratios) sum += r;
    report.avg_levenshtein_ratio_weighted = sum / static_cast<double>(all_ratios.size());
  }
  report.total.avg_levenshtein_ratio = report.avg_levenshtein_ratio;
  report.authors = std::move(fold.authors);
  return report;
}

nlohmann::json to_json(const AuthoringReport& report) {
  nlohmann::json authors = nlohmann::json::object();
  for (const auto& [author, s] : report.authors) authors[author] = stats_json(s);
  return {{"events", report.events},
          {"close_reopen_thresholds_s", report.thresholds_s},
          {"authors", authors},
          {"total", stats_json(report.total)},
          {"avg_levenshtein_ratio", report.avg_levenshtein_ratio},
          {"avg_levenshtein_ratio_weighted", report.avg_levenshtein_ratio_weighted}};
}

std::string to_text(const AuthoringReport& report) {
  std::vector<std::pair<std::string, const AuthorStats*>> cols;
  for (const auto& [author, s] : report.authors) cols.emplace_back(author, &s);
  cols.emplace_back("Total", &report.total);

  std::ostringstream os;
  os << std::fixed;
  auto row = [&](const std::string& label, auto getter) {
    os << std::left << std::setw(34) << label;
    for (const auto& [name, s] : cols) os << std::right << std::setw(10) << getter(*s);
    os << '\n';
  };
  os << std::left << std::setw(34) << "";
  for (const auto& [name, s] : cols) os << std::right << std::setw(10) << name;
  os << '\n';
  row("Examples created", [](const AuthorStats& s) { return s.examples_created; });
  row("Dialogs opened", [](const AuthorStats& s) { return s.dialogs_opened; });
  row("Sessions applied", [](const AuthorStats& s) { return s.sessions_applied; });
  row("Generated explanations", [](const AuthorStats& s) { return s.generated; });
  row("Lines explained", [](const AuthorStats& s) { return s.lines_explained; });
  row("Explanations excluded", [](const AuthorStats& s) { return s.excluded; });
  row("Explanations liked", [](const AuthorStats& s) { return s.liked; });
  row("Explanations edited", [](const AuthorStats& s) { return s.edited; });
  row("Explanation edits", [](const AuthorStats& s) { return s.edit_events; });
  row("Explanations removed", [](const AuthorStats& s) { return s.removed; });
  row("Close-reopen pairs", [](const AuthorStats& s) { return s.close_reopen_total; });
  os << std::setprecision(3);
  row("Fragments per line (all)", [](const AuthorStats& s) { return s.avg_fragments_per_line; });
  row("Edits per edited fragment", [](const AuthorStats& s) { return s.avg_edits_per_edited_fragment; });
  row("Levenshtein ratio", [](const AuthorStats& s) {
    return s.avg_levenshtein_ratio ? *s.avg_levenshtein_ratio : 1.0;
  });
  os << "Events: " << report.events << "  weighted ratio: " << report.avg_levenshtein_ratio_weighted
     << '\n';
  return os.str();
}

}  // namespace coex::review
