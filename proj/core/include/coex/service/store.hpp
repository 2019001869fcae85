#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coex/example.hpp"
#include "coex/llm/gateway.hpp"
#include "coex/review/event.hpp"

namespace coex::service {

/// Thrown by fault hooks to simulate a crash. The store performs no cleanup
/// when it sees one, so the directory is left exactly as a dying process
/// would leave it.
struct InjectedFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Data directory layout:
///   examples/<id>.json          committed portable documents
///   examples/<id>.pending.json  staged rewrite awaiting its event
///   events.ndjson               append-only event log
///   batches/<id>.json           generation batches incl. raw replies
///
/// A document change is staged first, then its event is appended (the
/// commit point), then the staged file replaces the committed one. open()
/// rolls staged files forward or back depending on whether the log holds an
/// event with the staged version.
class FileStore {
 public:
  using FaultHook = std::function<void(std::string_view point)>;

  struct Recovery {
    std::size_t truncated_bytes = 0;
    bool added_final_newline = false;
    std::vector<std::string> rolled_forward;
    std::vector<std::string> rolled_back;
    std::vector<std::string> removed_deleted;
    std::size_t removed_temp_files = 0;

    bool clean() const noexcept;
  };

  struct Loaded {
    std::vector<WorkedExample> examples;
    std::vector<review::AuthoringEvent> events;
    Recovery recovery;
  };

  explicit FileStore(std::filesystem::path root, FaultHook hook = nullptr, bool durable = true);
  ~FileStore();
  FileStore(const FileStore&) = delete;
  FileStore& operator=(const FileStore&) = delete;

  /// Creates the layout if needed, repairs crash leftovers and loads
  /// everything. Throws Error(kIntegrity) for damage it cannot repair.
  Loaded open();

  void stage_example(const WorkedExample& example);
  void commit_example(const std::string& id);
  void discard_staged(const std::string& id);
  void remove_example(const std::string& id);

  void append_event(const review::AuthoringEvent& event);

  void save_batch(const llm::GenerationBatch& batch);
  std::optional<llm::GenerationBatch> load_batch(const std::string& id) const;

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path events_path() const { return root_ / "events.ndjson"; }
  std::filesystem::path example_path(const std::string& id) const;
  std::filesystem::path staged_path(const std::string& id) const;

 private:
  void fault(std::string_view point) const;
  void write_atomic(const std::filesystem::path& target, const std::string& content,
                    std::string_view point) const;
  void sync_dir(const std::filesystem::path& dir) const;

  std::filesystem::path root_;
  FaultHook hook_;
  bool durable_;
  int events_fd_ = -1;
};

/// Rejects ids that could escape the data directory.
void require_safe_id(std::string_view id);

}  // namespace coex::service
