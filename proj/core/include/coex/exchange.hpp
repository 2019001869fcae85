#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "coex/example.hpp"

namespace coex::exchange {

inline constexpr int kPortableSchemaVersion = 1;
inline constexpr int kPcexSchemaVersion = 1;

/// Portable interchange document. With `with_identity` the example id,
/// version, timestamps and fragment sequence are included as well; the store
/// writes that form, exports leave it out.
nlohmann::json export_portable(const WorkedExample& example, bool with_identity = false);

enum class IdMode {
  kFresh,     // new example id, fragment ids renumbered, version 1
  kPreserve,  // identity fields required and kept
};

struct ImportOptions {
  IdMode ids = IdMode::kFresh;
  std::string new_id;  // kFresh only
  TimestampMs now = 0;  // kFresh only
};

/// Throws Error(kValidation) whose message starts with the offending field
/// path, e.g. "lines[2].fragments[0].original_text: required for generated".
WorkedExample import_portable(const nlohmann::json& doc, const ImportOptions& options);

/// PCEX-shaped document: fragment 0 is the default explanation, the rest are
/// additional details. Provenance (origin, original_text, liked, edit_count,
/// ids) is dropped; lines without fragments are omitted.
nlohmann::json export_pcex(const WorkedExample& example);

}  // namespace coex::exchange
