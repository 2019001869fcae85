#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coex/example.hpp"
#include "coex/ids.hpp"
#include "coex/llm/gateway.hpp"
#include "coex/llm/prompt.hpp"
#include "coex/metrics/report.hpp"
#include "coex/review/analytics.hpp"
#include "coex/review/engine.hpp"
#include "coex/review/event_log.hpp"
#include "coex/service/config.hpp"
#include "coex/service/store.hpp"

namespace coex::service {

struct ServiceOptions {
  ServiceConfig config;
  std::shared_ptr<llm::ChatProvider> provider;  // required
  Clock clock = system_clock();
  std::shared_ptr<IdGenerator> ids = std::make_shared<IdGenerator>();
  llm::Sleeper sleeper;  // null: real sleep
  FileStore::FaultHook fault_hook;
  bool durable = true;  // fsync writes
};

struct ExampleDraft {
  std::string title;
  std::string problem;
  Language language = Language::kJava;
  std::string source;
};

struct ExamplePatch {
  std::optional<std::string> title;
  std::optional<std::string> problem;
  std::optional<std::string> source;
};

struct GenerateParams {
  std::optional<std::string> prompt_template;  // overrides the default
  std::optional<double> temperature;
  std::optional<std::string> model;
};

enum class ExportFormat { kPortable, kPcex };
std::optional<ExportFormat> parse_export_format(std::string_view name) noexcept;

/// Every operation that changes state takes the acting author and, for an
/// existing example or session, the version the caller last saw; a mismatch
/// throws Error(kConflict). Each successful mutation appends one event.
class AuthoringService {
 public:
  AuthoringService(std::filesystem::path data_dir, ServiceOptions options);

  const FileStore::Recovery& recovery() const noexcept { return recovery_; }
  const ServiceConfig& config() const noexcept { return options_.config; }

  // examples
  WorkedExample create_example(const std::string& author, const ExampleDraft& draft);
  WorkedExample import_example(const std::string& author, const nlohmann::json& portable);
  std::vector<WorkedExample> list_examples() const;
  WorkedExample get_example(const std::string& id) const;
  WorkedExample update_example(const std::string& author, const std::string& id,
                               std::int64_t expected, const ExamplePatch& patch);
  void delete_example(const std::string& author, const std::string& id, std::int64_t expected);
  WorkedExample set_explainable(const std::string& author, const std::string& id,
                                std::int64_t expected, int line, bool explainable);

  // fragments
  WorkedExample add_fragment(const std::string& author, const std::string& id,
                             std::int64_t expected, int line, const std::string& text);
  WorkedExample edit_fragment(const std::string& author, const std::string& id,
                              std::int64_t expected, const std::string& fragment_id,
                              const std::string& text);
  WorkedExample set_liked(const std::string& author, const std::string& id, std::int64_t expected,
                          const std::string& fragment_id, bool liked);
  WorkedExample remove_fragment(const std::string& author, const std::string& id,
                                std::int64_t expected, const std::string& fragment_id);
  WorkedExample reorder_fragments(const std::string& author, const std::string& id,
                                  std::int64_t expected, int line,
                                  const std::vector<std::string>& order);
  WorkedExample merge_fragments(const std::string& author, const std::string& id,
                                std::int64_t expected, int line, const std::string& first_id,
                                const std::string& second_id, const std::string& separator);
  std::vector<ProvenanceSummary> provenance(const std::string& id) const;

  // generation dialog
  review::ReviewEngine::Opened open_dialog(const std::string& author, const std::string& example_id);
  review::ReviewSession close_dialog(const std::string& author, const std::string& session_id,
                                     std::int64_t expected);
  review::ReviewSession generate(const std::string& author, const std::string& session_id,
                                 std::int64_t expected, const GenerateParams& params);
  review::ReviewSession set_line_included(const std::string& author,
                                          const std::string& session_id, std::int64_t expected,
                                          int line, bool included);
  review::ReviewSession set_fragment_included(const std::string& author,
                                              const std::string& session_id,
                                              std::int64_t expected, int line, int index,
                                              bool included);
  review::ReviewSession toggle_like(const std::string& author, const std::string& session_id,
                                    std::int64_t expected, int line, int index);
  struct ApplyOutcome {
    review::ReviewSession session;
    WorkedExample example;
    review::ApplyResult result;
  };
  ApplyOutcome apply(const std::string& author, const std::string& session_id,
                     std::int64_t expected);
  review::ReviewSession session(const std::string& session_id) const;

  // export and reports
  nlohmann::json export_example(const std::string& author, const std::string& id,
                                ExportFormat format);
  review::AuthoringReport authoring_report() const;
  /// Groups "generated" (original texts of generated fragments) and "final"
  /// (current texts of all fragments), one source document per example.
  metrics::CorpusReport metrics_report() const;
  const llm::PromptTemplate& default_prompt() const noexcept { return *prompt_; }
  std::vector<review::AuthoringEvent> events() const { return log_->snapshot(); }

 private:
  struct Slot {
    std::mutex mutex;
    std::optional<WorkedExample> example;
  };

  std::shared_ptr<Slot> slot(const std::string& id) const;
  std::shared_ptr<Slot> session_slot(const std::string& session_id) const;

  template <class F>
  WorkedExample mutate(const std::string& author, const std::string& id, std::int64_t expected,
                       F&& change);
  review::ReviewSession checked_session(const std::string& session_id,
                                        std::int64_t expected) const;

  ServiceOptions options_;
  std::unique_ptr<FileStore> store_;
  FileStore::Recovery recovery_;
  std::unique_ptr<review::EventLog> log_;
  std::unique_ptr<review::ReviewEngine> engine_;
  std::unique_ptr<llm::Gateway> gateway_;
  std::shared_ptr<const metrics::StopwordList> stopwords_;
  std::optional<llm::PromptTemplate> prompt_;
  std::counting_semaphore<> generation_slots_;

  mutable std::shared_mutex slots_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

nlohmann::json example_json(const WorkedExample& example);
nlohmann::json session_json(const review::ReviewSession& session);
nlohmann::json provenance_json(const std::vector<ProvenanceSummary>& rows);

}  // namespace coex::service
