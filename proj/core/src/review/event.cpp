#include "coex/review/event.hpp"

#include <array>
#include <utility>

#include "coex/error.hpp"

namespace coex::review {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 19> kNames{{
    {EventKind::kExampleCreated, "example_created"},
    {EventKind::kExampleUpdated, "example_updated"},
    {EventKind::kExampleDeleted, "example_deleted"},
    {EventKind::kLineExplainabilityChanged, "line_explainability_changed"},
    {EventKind::kDialogOpened, "dialog_opened"},
    {EventKind::kDialogClosed, "dialog_closed"},
    {EventKind::kGenerated, "generated"},
    {EventKind::kLineIncluded, "line_included"},
    {EventKind::kLineExcluded, "line_excluded"},
    {EventKind::kFragmentIncluded, "fragment_included"},
    {EventKind::kFragmentExcluded, "fragment_excluded"},
    {EventKind::kFragmentLiked, "fragment_liked"},
    {EventKind::kExplanationsUsed, "explanations_used"},
    {EventKind::kFragmentEdited, "fragment_edited"},
    {EventKind::kFragmentRemoved, "fragment_removed"},
    {EventKind::kFragmentAdded, "fragment_added"},
    {EventKind::kFragmentsMerged, "fragments_merged"},
    {EventKind::kFragmentsReordered, "fragments_reordered"},
    {EventKind::kExported, "exported"},
}};

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

nlohmann::json to_json(const AuthoringEvent& event) {
  return {{"sequence", event.sequence},
          {"author_id", event.author_id},
          {"example_id", event.example_id},
          {"timestamp", format_iso8601(event.timestamp)},
          {"kind", to_string(event.kind)},
          {"payload", event.payload}};
}

AuthoringEvent event_from_json(const nlohmann::json& doc) {
  try {
    AuthoringEvent e;
    e.sequence = doc.at("sequence").get<std::int64_t>();
    e.author_id = doc.at("author_id").get<std::string>();
    e.example_id = doc.at("example_id").get<std::string>();
    e.timestamp = parse_iso8601(doc.at("timestamp").get<std::string>());
    const auto kind_name = doc.at("kind").get<std::string>();
    auto kind = parse_event_kind(kind_name);
    if (!kind) throw Error(ErrorKind::kIntegrity, "unknown event kind '" + kind_name + "'");
    e.kind = *kind;
    e.payload = doc.value("payload", nlohmann::json::object());
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kIntegrity, std::string("malformed event record: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.kind() == ErrorKind::kIntegrity) throw;
    throw Error(ErrorKind::kIntegrity, std::string("malformed event record: ") + ex.what());
  }
}

}  // namespace coex::review
