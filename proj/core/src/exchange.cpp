#include "coex/exchange.hpp"


#include "coex/error.hpp"

namespace coex::exchange {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw_validation(path + ": " + what);
}

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& field(const json& obj, const std::string& path, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(child(path, key), "required field missing");
  return *it;
}

std::string string_field(const json& obj, const std::string& path, std::string_view key) {
  const json& v = field(obj, path, key);
  if (!v.is_string()) fail(child(path, key), "expected a string");
  return v.get<std::string>();
}

std::int64_t int_field(const json& obj, const std::string& path, std::string_view key) {
  const json& v = field(obj, path, key);
  if (!v.is_number_integer()) fail(child(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

bool bool_field(const json& obj, const std::string& path, std::string_view key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(child(path, key), "expected a boolean");
  return it->get<bool>();
}

TimestampMs time_field(const json& obj, const std::string& path, std::string_view key) {
  const std::string text = string_field(obj, path, key);
  try {
    return parse_iso8601(text);
  } catch (const Error& e) {
    fail(child(path, key), e.what());
  }
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it.key() == a;
    if (!known) fail(child(path, it.key()), "unknown field");
  }
}

ExplanationFragment read_fragment(const json& f, const std::string& path, std::size_t pos,
                                  IdMode mode) {
  if (!f.is_object()) fail(path, "expected an object");
  reject_unknown(f, path, {"id", "text", "origin", "original_text", "liked", "edit_count"});
  ExplanationFragment out;
  out.position = static_cast<int>(pos);
  out.text = string_field(f, path, "text");
  const std::string origin = string_field(f, path, "origin");
  auto parsed = parse_origin(origin);
  if (!parsed) fail(child(path, "origin"), "must be \"generated\" or \"human\"");
  out.origin = *parsed;
  auto orig = f.find("original_text");
  if (orig != f.end() && !orig->is_null()) {
    if (!orig->is_string()) fail(child(path, "original_text"), "expected a string");
    if (out.origin == Origin::kHuman) {
      fail(child(path, "original_text"), "only allowed for generated fragments");
    }
    out.original_text = orig->get<std::string>();
  } else if (out.origin == Origin::kGenerated) {
    fail(child(path, "original_text"), "required for generated fragments");
  }
  out.liked = bool_field(f, path, "liked", false);
  if (f.contains("edit_count")) {
    const auto n = int_field(f, path, "edit_count");
    if (n < 0) fail(child(path, "edit_count"), "must be non-negative");
    out.edit_count = static_cast<int>(n);
  }
  if (mode == IdMode::kPreserve) out.id = string_field(f, path, "id");
  return out;
}

}  // namespace

nlohmann::json export_portable(const WorkedExample& example, bool with_identity) {
  json lines = json::array();
  for (const auto& line : example.lines()) {
    json frags = json::array();
    for (const auto& f : line.fragments) {
      json jf = {{"id", f.id},
                 {"text", f.text},
                 {"origin", to_string(f.origin)},
                 {"liked", f.liked},
                 {"edit_count", f.edit_count}};
      if (f.original_text) jf["original_text"] = *f.original_text;
      frags.push_back(std::move(jf));
    }
    lines.push_back({{"number", line.number},
                     {"text", line.text},
                     {"explainable", line.explainable},
                     {"fragments", std::move(frags)}});
  }
  json doc = {{"schema_version", kPortableSchemaVersion},
              {"title", example.title()},
              {"problem", example.problem()},
              {"language", to_string(example.language())},
              {"lines", std::move(lines)}};
  if (with_identity) {
    const auto& d = example.data();
    doc["id"] = d.id;
    doc["version"] = d.version;
    doc["created_at"] = format_iso8601(d.created_at);
    doc["updated_at"] = format_iso8601(d.updated_at);
    doc["next_fragment_seq"] = d.next_fragment_seq;
  }
  return doc;
}

WorkedExample import_portable(const nlohmann::json& doc, const ImportOptions& options) {
  const std::string root;
  if (!doc.is_object()) fail("$", "expected a JSON object");
  reject_unknown(doc, root,
                 {"schema_version", "title", "problem", "language", "lines", "id", "version",
                  "created_at", "updated_at", "next_fragment_seq"});
  const auto schema = int_field(doc, root, "schema_version");
  if (schema != kPortableSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(schema));
  }

  ExampleData data;
  data.title = string_field(doc, root, "title");
  data.problem = string_field(doc, root, "problem");
  const std::string lang = string_field(doc, root, "language");
  auto language = parse_language(lang);
  if (!language) fail("language", "unsupported language \"" + lang + "\"");
  data.language = *language;

  const json& lines = field(doc, root, "lines");
  if (!lines.is_array()) fail("lines", "expected an array");
  if (lines.empty()) fail("lines", "must contain at least one line");

  std::vector<std::string> texts;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string path = index("lines", i);
    const json& l = lines[i];
    if (!l.is_object()) fail(path, "expected an object");
    reject_unknown(l, path, {"number", "text", "explainable", "fragments"});
    const auto number = int_field(l, path, "number");
    if (number != static_cast<std::int64_t>(i) + 1) {
      fail(child(path, "number"), "expected " + std::to_string(i + 1));
    }
    CodeLine line;
    line.number = static_cast<int>(number);
    line.text = string_field(l, path, "text");
    if (line.text.find('\n') != std::string::npos) fail(child(path, "text"), "contains a newline");
    texts.push_back(line.text);
    const json& frags = field(l, path, "fragments");
    if (!frags.is_array()) fail(child(path, "fragments"), "expected an array");
    for (std::size_t k = 0; k < frags.size(); ++k) {
      line.fragments.push_back(
          read_fragment(frags[k], index(child(path, "fragments"), k), k, options.ids));
    }
    data.lines.push_back(std::move(line));
  }

  // kind is derived, explainable is an instructor-editable override
  auto segmented = segment::segment_source(segment::join_lines(texts), data.language);
  for (std::size_t i = 0; i < data.lines.size(); ++i) {
    const std::string path = index("lines", i);
    data.lines[i].kind = segmented[i].line_class.kind;
    data.lines[i].explainable =
        bool_field(lines[i], path, "explainable", segmented[i].line_class.explainable);
  }

  if (options.ids == IdMode::kPreserve) {
    data.id = string_field(doc, root, "id");
    if (data.id.empty()) fail("id", "must not be empty");
    data.version = int_field(doc, root, "version");
    if (data.version < 1) fail("version", "must be at least 1");
    data.created_at = time_field(doc, root, "created_at");
    data.updated_at = time_field(doc, root, "updated_at");
    if (doc.contains("next_fragment_seq")) {
      data.next_fragment_seq = int_field(doc, root, "next_fragment_seq");
    }
  } else {
    data.id = options.new_id;
    data.version = 1;
    data.created_at = data.updated_at = options.now;
    std::int64_t seq = 1;
    for (auto& line : data.lines) {
      for (auto& f : line.fragments) f.id = "fr-" + std::to_string(seq++);
    }
    data.next_fragment_seq = seq;
  }

  try {
    return WorkedExample::from_data(std::move(data));
  } catch (const Error& e) {
    throw Error(ErrorKind::kValidation, std::string("$: ") + e.what());
  }
}

nlohmann::json export_pcex(const WorkedExample& example) {
  json lines = json::array();
  for (const auto& line : example.lines()) {
    if (line.fragments.empty()) continue;
    json details = json::array();
    for (std::size_t i = 1; i < line.fragments.size(); ++i) details.push_back(line.fragments[i].text);
    lines.push_back({{"number", line.number},
                     {"default_explanation", line.fragments.front().text},
                     {"additional_details", std::move(details)}});
  }
  return {{"format", "pcex-example"},
          {"schema_version", kPcexSchemaVersion},
          {"title", example.title()},
          {"description", example.problem()},
          {"language", to_string(example.language())},
          {"code", example.source()},
          {"challenges", json::array()},
          {"lines", std::move(lines)}};
}

}  // namespace coex::exchange
