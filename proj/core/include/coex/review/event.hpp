#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "coex/time.hpp"

namespace coex::review {

enum class EventKind {
  kExampleCreated,
  kExampleUpdated,
  kExampleDeleted,
  kLineExplainabilityChanged,
  kDialogOpened,
  kDialogClosed,
  kGenerated,
  kLineIncluded,
  kLineExcluded,
  kFragmentIncluded,
  kFragmentExcluded,
  kFragmentLiked,
  kExplanationsUsed,
  kFragmentEdited,
  kFragmentRemoved,
  kFragmentAdded,
  kFragmentsMerged,
  kFragmentsReordered,
  kExported,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view name) noexcept;

struct AuthoringEvent {
  std::int64_t sequence = 0;
  std::string author_id;
  std::string example_id;
  TimestampMs timestamp = 0;
  EventKind kind = EventKind::kExampleCreated;
  nlohmann::json payload = nlohmann::json::object();
};

/// {"sequence":..,"author_id":..,"example_id":..,"timestamp":"<ISO-8601>",
///  "kind":..,"payload":{..}}
nlohmann::json to_json(const AuthoringEvent& event);

/// Throws Error(kIntegrity) on a malformed record.
AuthoringEvent event_from_json(const nlohmann::json& doc);

}  // namespace coex::review
