#include "coex/service/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "coex/error.hpp"
#include "coex/exchange.hpp"
#include "coex/review/event_log.hpp"

namespace coex::service {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStagedSuffix = ".pending.json";

[[noreturn]] void io_error(const std::string& what) {
  throw Error(ErrorKind::kIo, what + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t size, const fs::path& path) {
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("write " + path.string());
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

WorkedExample read_example(const fs::path& path) {
  try {
    auto doc = nlohmann::json::parse(read_file(path));
    return exchange::import_portable(doc, {exchange::IdMode::kPreserve, {}, 0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kIntegrity, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(ErrorKind::kIntegrity, path.string() + ": " + e.what());
  }
}

}  // namespace

bool FileStore::Recovery::clean() const noexcept {
  return truncated_bytes == 0 && !added_final_newline && rolled_forward.empty() &&
         rolled_back.empty() && removed_deleted.empty() && removed_temp_files == 0;
}

void require_safe_id(std::string_view id) {
  if (id.empty() || id.size() > 128) throw_validation("invalid id");
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) throw_not_found("unknown id '" + std::string(id) + "'");
  }
}

FileStore::FileStore(fs::path root, FaultHook hook, bool durable)
    : root_(std::move(root)), hook_(std::move(hook)), durable_(durable) {}

FileStore::~FileStore() {
  if (events_fd_ >= 0) ::close(events_fd_);
}

fs::path FileStore::example_path(const std::string& id) const {
  require_safe_id(id);
  return root_ / "examples" / (id + ".json");
}

fs::path FileStore::staged_path(const std::string& id) const {
  require_safe_id(id);
  return root_ / "examples" / (id + std::string(kStagedSuffix));
}

void FileStore::fault(std::string_view point) const {
  if (hook_) hook_(point);
}

void FileStore::sync_dir(const fs::path& dir) const {
  if (!durable_) return;
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

void FileStore::write_atomic(const fs::path& target, const std::string& content,
                             std::string_view point) const {
  const fs::path tmp = target.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("open " + tmp.string());
  try {
    write_all(fd, content.data(), content.size(), tmp);
    if (durable_ && ::fsync(fd) != 0) io_error("fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
  ::close(fd);
  fault(std::string(point) + ".tmp_written");
  if (::rename(tmp.c_str(), target.c_str()) != 0) io_error("rename " + tmp.string());
  sync_dir(target.parent_path());
}

FileStore::Loaded FileStore::open() {
  Loaded out;
  fs::create_directories(root_ / "examples");
  fs::create_directories(root_ / "batches");

  for (const auto* sub : {"examples", "batches"}) {
    for (const auto& entry : fs::directory_iterator(root_ / sub)) {
      if (ends_with(entry.path().filename().string(), ".tmp")) {
        fs::remove(entry.path());
        ++out.recovery.removed_temp_files;
      }
    }
  }

  // Event log: a crash can leave a torn final record.
  const fs::path log_path = events_path();
  if (fs::exists(log_path)) {
    std::ifstream in(log_path, std::ios::binary);
    auto read = review::read_ndjson(in, /*tolerate_torn_tail=*/true);
    in.close();
    const auto size = fs::file_size(log_path);
    if (read.truncated_tail) {
      fs::resize_file(log_path, read.valid_bytes);
      out.recovery.truncated_bytes = size - read.valid_bytes;
    }
    out.events = std::move(read.events);
    if (read.missing_final_newline) {
      std::ofstream app(log_path, std::ios::binary | std::ios::app);
      app << '\n';
      out.recovery.added_final_newline = true;
    }
    review::verify_sequence(out.events);
  }

  std::map<std::string, std::int64_t> logged_version;
  std::map<std::string, bool> deleted;
  for (const auto& e : out.events) {
    if (e.kind == review::EventKind::kExampleDeleted) {
      deleted[e.example_id] = true;
    } else if (e.kind == review::EventKind::kExampleCreated) {
      deleted[e.example_id] = false;
    }
    if (auto it = e.payload.find("example_version");
        it != e.payload.end() && it->is_number_integer()) {
      auto& v = logged_version[e.example_id];
      v = std::max(v, it->get<std::int64_t>());
    }
  }

  std::vector<fs::path> staged;
  for (const auto& entry : fs::directory_iterator(root_ / "examples")) {
    if (ends_with(entry.path().filename().string(), kStagedSuffix)) staged.push_back(entry.path());
  }
  for (const auto& path : staged) {
    const std::string name = path.filename().string();
    const std::string id = name.substr(0, name.size() - kStagedSuffix.size());
    bool forward = false;
    try {
      WorkedExample ex = read_example(path);
      auto it = logged_version.find(id);
      forward = it != logged_version.end() && it->second == ex.version() && !deleted[id];
    } catch (const Error&) {
      forward = false;  // unreadable staged file: its event cannot exist
    }
    if (forward) {
      fs::rename(path, example_path(id));
      out.recovery.rolled_forward.push_back(id);
    } else {
      fs::remove(path);
      out.recovery.rolled_back.push_back(id);
    }
  }
  sync_dir(root_ / "examples");

  std::vector<fs::path> committed;
  for (const auto& entry : fs::directory_iterator(root_ / "examples")) {
    if (entry.path().extension() == ".json") committed.push_back(entry.path());
  }
  std::sort(committed.begin(), committed.end());
  for (const auto& path : committed) {
    const std::string id = path.stem().string();
    if (deleted[id]) {
      fs::remove(path);
      out.recovery.removed_deleted.push_back(id);
      continue;
    }
    WorkedExample ex = read_example(path);
    if (ex.id() != id) {
      throw Error(ErrorKind::kIntegrity, path.string() + ": id does not match file name");
    }
    out.examples.push_back(std::move(ex));
  }

  events_fd_ = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (events_fd_ < 0) io_error("open " + log_path.string());
  sync_dir(root_);
  return out;
}

void FileStore::stage_example(const WorkedExample& example) {
  write_atomic(staged_path(example.id()), exchange::export_portable(example, true).dump(2) + "\n",
               "example");
  fault("example.staged");
}

void FileStore::commit_example(const std::string& id) {
  fault("example.before_commit");
  const fs::path from = staged_path(id);
  if (::rename(from.c_str(), example_path(id).c_str()) != 0) io_error("rename " + from.string());
  sync_dir(root_ / "examples");
}

void FileStore::discard_staged(const std::string& id) {
  std::error_code ec;
  fs::remove(staged_path(id), ec);
}

void FileStore::remove_example(const std::string& id) {
  fault("example.before_remove");
  std::error_code ec;
  fs::remove(example_path(id), ec);
  sync_dir(root_ / "examples");
}

void FileStore::append_event(const review::AuthoringEvent& event) {
  if (events_fd_ < 0) throw Error(ErrorKind::kIo, "store is not open");
  const std::string line = review::to_ndjson_line(event);
  fault("event.before_write");
  struct stat st {};
  const off_t before = ::fstat(events_fd_, &st) == 0 ? st.st_size : -1;
  try {
    const std::size_t half = line.size() / 2;
    write_all(events_fd_, line.data(), half, events_path());
    fault("event.partial");
    write_all(events_fd_, line.data() + half, line.size() - half, events_path());
    if (durable_ && ::fdatasync(events_fd_) != 0) io_error("fsync " + events_path().string());
  } catch (const InjectedFault&) {
    throw;
  } catch (...) {
    if (before >= 0) {
      [[maybe_unused]] const int rc = ::ftruncate(events_fd_, before);
    }
    throw;
  }
}

void FileStore::save_batch(const llm::GenerationBatch& batch) {
  require_safe_id(batch.id);
  write_atomic(root_ / "batches" / (batch.id + ".json"), llm::to_json(batch).dump(2) + "\n",
               "batch");
}

std::optional<llm::GenerationBatch> FileStore::load_batch(const std::string& id) const {
  require_safe_id(id);
  const fs::path path = root_ / "batches" / (id + ".json");
  if (!fs::exists(path)) return std::nullopt;
  try {
    return llm::batch_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kIntegrity, path.string() + ": " + e.what());
  }
}

}  // namespace coex::service
