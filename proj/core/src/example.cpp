#include "coex/example.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

#include "coex/error.hpp"
#include "coex/metrics/levenshtein.hpp"

namespace coex {

std::string_view to_string(Origin origin) noexcept {
  return origin == Origin::kGenerated ? "generated" : "human";
}

std::optional<Origin> parse_origin(std::string_view name) noexcept {
  if (name == "generated") return Origin::kGenerated;
  if (name == "human") return Origin::kHuman;
  return std::nullopt;
}

namespace {

bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

void require_text(std::string_view text) {
  if (is_blank(text)) throw_validation("explanation text must not be empty");
}

void renumber(CodeLine& line) {
  for (std::size_t i = 0; i < line.fragments.size(); ++i) {
    line.fragments[i].position = static_cast<int>(i);
  }
}

// "fr-17" -> 17, anything else -> 0
std::int64_t fragment_seq(std::string_view id) {
  if (id.substr(0, 3) != "fr-") return 0;
  std::int64_t v = 0;
  auto rest = id.substr(3);
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
  if (ec != std::errc{} || ptr != rest.data() + rest.size()) return 0;
  return v;
}

std::vector<CodeLine> lines_from_source(std::string_view source, Language language) {
  std::vector<CodeLine> lines;
  for (auto& seg : segment::segment_source(source, language)) {
    lines.push_back({seg.number, std::move(seg.text), seg.line_class.kind,
                     seg.line_class.explainable, {}});
  }
  return lines;
}

}  // namespace

WorkedExample WorkedExample::create(std::string id, std::string title, std::string problem,
                                    Language language, std::string_view source,
                                    TimestampMs now) {
  if (source.empty()) throw_validation("source must not be empty");
  ExampleData data;
  data.id = std::move(id);
  data.title = std::move(title);
  data.problem = std::move(problem);
  data.language = language;
  data.lines = lines_from_source(source, language);
  data.version = 1;
  data.created_at = now;
  data.updated_at = now;
  return WorkedExample(std::move(data));
}

WorkedExample WorkedExample::from_data(ExampleData data) {
  if (data.id.empty()) throw_validation("id: must not be empty");
  if (data.lines.empty()) throw_validation("lines: at least one line required");
  if (data.version < 1) throw_validation("version: must be >= 1");
  std::unordered_set<std::string> ids;
  std::int64_t max_seq = 0;
  for (std::size_t i = 0; i < data.lines.size(); ++i) {
    const CodeLine& line = data.lines[i];
    const std::string where = "lines[" + std::to_string(i) + "]";
    if (line.number != static_cast<int>(i) + 1) {
      throw_validation(where + ".number: expected " + std::to_string(i + 1));
    }
    if (line.text.find('\n') != std::string::npos) {
      throw_validation(where + ".text: must not contain a newline");
    }
    if (!line.explainable && !line.fragments.empty()) {
      throw_validation(where + ".fragments: non-explainable line cannot carry fragments");
    }
    for (std::size_t k = 0; k < line.fragments.size(); ++k) {
      const ExplanationFragment& f = line.fragments[k];
      const std::string fwhere = where + ".fragments[" + std::to_string(k) + "]";
      if (f.id.empty()) throw_validation(fwhere + ".id: must not be empty");
      if (!ids.insert(f.id).second) throw_validation(fwhere + ".id: duplicate '" + f.id + "'");
      if (f.position != static_cast<int>(k)) {
        throw_validation(fwhere + ".position: expected " + std::to_string(k));
      }
      if (is_blank(f.text)) throw_validation(fwhere + ".text: must not be empty");
      if (f.origin == Origin::kGenerated && !f.original_text) {
        throw_validation(fwhere + ".original_text: required for generated fragments");
      }
      if (f.origin == Origin::kHuman && f.original_text) {
        throw_validation(fwhere + ".original_text: not allowed for human fragments");
      }
      if (f.edit_count < 0) throw_validation(fwhere + ".edit_count: must be >= 0");
      max_seq = std::max(max_seq, fragment_seq(f.id));
    }
  }
  data.next_fragment_seq = std::max(data.next_fragment_seq, max_seq + 1);
  return WorkedExample(std::move(data));
}

std::string WorkedExample::source() const {
  std::string out;
  for (const auto& line : data_.lines) {
    if (line.number > 1) out += '\n';
    out += line.text;
  }
  return out;
}

const CodeLine& WorkedExample::line(int number) const {
  if (number < 1 || number > static_cast<int>(data_.lines.size())) {
    throw_not_found("unknown line " + std::to_string(number));
  }
  return data_.lines[static_cast<std::size_t>(number - 1)];
}

CodeLine& WorkedExample::mutable_line(int number) {
  return const_cast<CodeLine&>(std::as_const(*this).line(number));
}

std::pair<CodeLine*, std::size_t> WorkedExample::locate(std::string_view fragment_id) {
  for (auto& line : data_.lines) {
    for (std::size_t i = 0; i < line.fragments.size(); ++i) {
      if (line.fragments[i].id == fragment_id) return {&line, i};
    }
  }
  throw_not_found("unknown fragment '" + std::string(fragment_id) + "'");
}

const ExplanationFragment& WorkedExample::fragment(std::string_view fragment_id) const {
  auto [line, index] = const_cast<WorkedExample*>(this)->locate(fragment_id);
  return line->fragments[index];
}

int WorkedExample::line_of(std::string_view fragment_id) const {
  return const_cast<WorkedExample*>(this)->locate(fragment_id).first->number;
}

std::vector<int> WorkedExample::explainable_lines() const {
  std::vector<int> out;
  for (const auto& line : data_.lines) {
    if (line.explainable) out.push_back(line.number);
  }
  return out;
}

std::size_t WorkedExample::fragment_count() const noexcept {
  std::size_t n = 0;
  for (const auto& line : data_.lines) n += line.fragments.size();
  return n;
}

void WorkedExample::touch(TimestampMs now) {
  ++data_.version;
  data_.updated_at = std::max(now, data_.updated_at);
}

void WorkedExample::update_details(std::string title, std::string problem, TimestampMs now) {
  data_.title = std::move(title);
  data_.problem = std::move(problem);
  touch(now);
}

void WorkedExample::replace_source(std::string_view source, TimestampMs now) {
  if (source.empty()) throw_validation("source must not be empty");
  auto fresh = lines_from_source(source, data_.language);
  for (const auto& old : data_.lines) {
    if (old.fragments.empty()) continue;
    const std::size_t idx = static_cast<std::size_t>(old.number - 1);
    if (idx >= fresh.size()) {
      throw_validation("line " + std::to_string(old.number) +
                       " has fragments but no longer exists in the new source");
    }
    if (!fresh[idx].explainable) {
      throw_validation("line " + std::to_string(old.number) +
                       " has fragments but is not explainable in the new source");
    }
    fresh[idx].fragments = old.fragments;
  }
  data_.lines = std::move(fresh);
  touch(now);
}

const CodeLine& WorkedExample::set_explainable(int line_number, bool explainable,
                                               TimestampMs now) {
  CodeLine& line = mutable_line(line_number);
  if (!explainable && !line.fragments.empty()) {
    throw_validation("line " + std::to_string(line_number) +
                     " has fragments; remove them before marking it non-explainable");
  }
  line.explainable = explainable;
  touch(now);
  return line;
}

const ExplanationFragment& WorkedExample::add_fragment(int line_number, std::string text,
                                                       Origin origin, TimestampMs now,
                                                       bool liked) {
  CodeLine& line = mutable_line(line_number);
  if (!line.explainable) {
    throw_validation("line " + std::to_string(line_number) + " is not explainable");
  }
  require_text(text);
  ExplanationFragment f;
  f.id = "fr-" + std::to_string(data_.next_fragment_seq++);
  f.position = static_cast<int>(line.fragments.size());
  f.origin = origin;
  if (origin == Origin::kGenerated) f.original_text = text;
  f.text = std::move(text);
  f.liked = liked;
  line.fragments.push_back(std::move(f));
  touch(now);
  return line.fragments.back();
}

const ExplanationFragment& WorkedExample::edit_fragment(std::string_view fragment_id,
                                                        std::string new_text, TimestampMs now) {
  auto [line, index] = locate(fragment_id);
  require_text(new_text);
  ExplanationFragment& f = line->fragments[index];
  if (f.text != new_text) {
    f.text = std::move(new_text);
    ++f.edit_count;
  }
  touch(now);
  return f;
}

const CodeLine& WorkedExample::remove_fragment(std::string_view fragment_id, TimestampMs now) {
  auto [line, index] = locate(fragment_id);
  line->fragments.erase(line->fragments.begin() + static_cast<std::ptrdiff_t>(index));
  renumber(*line);
  touch(now);
  return *line;
}

const CodeLine& WorkedExample::reorder_fragments(int line_number,
                                                 std::span<const std::string> order,
                                                 TimestampMs now) {
  CodeLine& line = mutable_line(line_number);
  std::set<std::string_view> wanted(order.begin(), order.end());
  std::set<std::string_view> have;
  for (const auto& f : line.fragments) have.insert(f.id);
  if (wanted.size() != order.size() || wanted != have) {
    throw_validation("permutation must list each fragment of line " +
                     std::to_string(line_number) + " exactly once");
  }
  std::vector<ExplanationFragment> reordered;
  reordered.reserve(order.size());
  for (const auto& id : order) {
    auto it = std::find_if(line.fragments.begin(), line.fragments.end(),
                           [&](const ExplanationFragment& f) { return f.id == id; });
    reordered.push_back(std::move(*it));
  }
  line.fragments = std::move(reordered);
  renumber(line);
  touch(now);
  return line;
}

const ExplanationFragment& WorkedExample::merge_fragments(int line_number,
                                                          std::string_view first_id,
                                                          std::string_view second_id,
                                                          std::string_view separator,
                                                          TimestampMs now) {
  if (first_id == second_id) throw_validation("cannot merge a fragment with itself");
  CodeLine& line = mutable_line(line_number);
  auto find = [&](std::string_view id) -> std::size_t {
    for (std::size_t i = 0; i < line.fragments.size(); ++i) {
      if (line.fragments[i].id == id) return i;
    }
    // Distinguish "elsewhere in the example" from "does not exist".
    (void)this->fragment(id);
    throw_validation("fragment '" + std::string(id) + "' is not on line " +
                     std::to_string(line_number));
  };
  const std::size_t first = find(first_id);
  const std::size_t second = find(second_id);

  ExplanationFragment& a = line.fragments[first];
  const ExplanationFragment& b = line.fragments[second];
  a.text += separator;
  a.text += b.text;
  if (a.origin == Origin::kGenerated || b.origin == Origin::kGenerated) {
    if (!a.original_text) a.original_text = b.original_text;
    a.origin = Origin::kGenerated;
  }
  a.liked = a.liked || b.liked;
  ++a.edit_count;
  line.fragments.erase(line.fragments.begin() + static_cast<std::ptrdiff_t>(second));
  renumber(line);
  touch(now);
  return line.fragments[first < second ? first : first - 1];
}

const ExplanationFragment& WorkedExample::set_liked(std::string_view fragment_id, bool liked,
                                                    TimestampMs now) {
  auto [line, index] = locate(fragment_id);
  line->fragments[index].liked = liked;
  touch(now);
  return line->fragments[index];
}

std::vector<ProvenanceSummary> WorkedExample::provenance() const {
  std::vector<ProvenanceSummary> rows;
  for (const auto& line : data_.lines) {
    for (const auto& f : line.fragments) {
      double ratio = 1.0;
      if (f.origin == Origin::kGenerated && f.original_text) {
        ratio = metrics::levenshtein_ratio(*f.original_text, f.text);
      }
      rows.push_back({f.id, line.number, f.origin, ratio});
    }
  }
  return rows;
}

double mean_ratio(std::span<const ProvenanceSummary> rows) {
  if (rows.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.levenshtein_ratio;
  return sum / static_cast<double>(rows.size());
}

}  // namespace coex
