#include "coex/service/authoring_service.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include "coex/error.hpp"
#include "coex/exchange.hpp"
#include "coex/metrics/text.hpp"

namespace coex::service {
namespace {

using nlohmann::json;
using review::EventKind;

using Change = std::pair<EventKind, json>;

void check_version(std::int64_t actual, std::int64_t expected, std::string_view what) {
  if (actual != expected) {
    throw_conflict(std::string(what) + " is at version " + std::to_string(actual) +
                   ", request expected " + std::to_string(expected));
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

json created_payload(const WorkedExample& ex, std::string_view via) {
  return {{"title", ex.title()},
          {"language", to_string(ex.language())},
          {"lines", ex.lines().size()},
          {"explainable_lines", ex.explainable_lines().size()},
          {"fragments", ex.fragment_count()},
          {"via", via},
          {"example_version", ex.version()}};
}

}  // namespace

std::optional<ExportFormat> parse_export_format(std::string_view name) noexcept {
  if (name == "portable") return ExportFormat::kPortable;
  if (name == "pcex") return ExportFormat::kPcex;
  return std::nullopt;
}

AuthoringService::AuthoringService(std::filesystem::path data_dir, ServiceOptions options)
    : options_(std::move(options)),
      generation_slots_(std::max(1, options_.config.max_concurrent_generations)) {
  if (!options_.provider) throw_validation("a chat provider is required");
  if (!options_.clock) options_.clock = system_clock();
  if (!options_.ids) options_.ids = std::make_shared<IdGenerator>();

  stopwords_ = options_.config.stopwords_path
                   ? metrics::StopwordList::load_file(*options_.config.stopwords_path)
                   : metrics::StopwordList::builtin();
  prompt_ = options_.config.prompt_path
                ? llm::PromptTemplate::parse(read_text_file(*options_.config.prompt_path))
                : llm::PromptTemplate::default_template();

  store_ = std::make_unique<FileStore>(std::move(data_dir), options_.fault_hook, options_.durable);
  FileStore::Loaded loaded = store_->open();
  recovery_ = loaded.recovery;

  for (auto& ex : loaded.examples) {
    auto s = std::make_shared<Slot>();
    const std::string id = ex.id();
    s->example = std::move(ex);
    slots_.emplace(id, std::move(s));
  }

  FileStore* store = store_.get();
  log_ = std::make_unique<review::EventLog>(
      loaded.events, options_.clock,
      [store](const review::AuthoringEvent& e) { store->append_event(e); });
  engine_ = std::make_unique<review::ReviewEngine>(*log_, options_.ids, options_.clock);
  engine_->replay(loaded.events, [store](const std::string& batch_id) {
    return store->load_batch(batch_id);
  });

  llm::Sleeper sleeper = options_.sleeper;
  if (!sleeper) sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  gateway_ = std::make_unique<llm::Gateway>(options_.provider, options_.config.retry, sleeper,
                                            options_.clock, options_.ids);
}

std::shared_ptr<AuthoringService::Slot> AuthoringService::slot(const std::string& id) const {
  std::shared_lock lock(slots_mutex_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw_not_found("unknown example '" + id + "'");
  return it->second;
}

std::shared_ptr<AuthoringService::Slot> AuthoringService::session_slot(
    const std::string& session_id) const {
  return slot(engine_->session(session_id).example_id());
}

template <class F>
WorkedExample AuthoringService::mutate(const std::string& author, const std::string& id,
                                       std::int64_t expected, F&& change) {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  if (!s->example) throw_not_found("unknown example '" + id + "'");
  check_version(s->example->version(), expected, "example");
  WorkedExample updated = *s->example;
  Change c = change(updated, options_.clock());
  c.second["example_version"] = updated.version();
  store_->stage_example(updated);
  try {
    log_->append({author, id, c.first, std::move(c.second)});
  } catch (const InjectedFault&) {
    throw;
  } catch (...) {
    store_->discard_staged(id);
    throw;
  }
  store_->commit_example(id);
  s->example = std::move(updated);
  return *s->example;
}

WorkedExample AuthoringService::create_example(const std::string& author,
                                               const ExampleDraft& draft) {
  WorkedExample ex = WorkedExample::create(options_.ids->next("ex"), draft.title, draft.problem,
                                           draft.language, draft.source, options_.clock());
  auto s = std::make_shared<Slot>();
  std::lock_guard lock(s->mutex);
  store_->stage_example(ex);
  try {
    log_->append({author, ex.id(), EventKind::kExampleCreated, created_payload(ex, "create")});
  } catch (const InjectedFault&) {
    throw;
  } catch (...) {
    store_->discard_staged(ex.id());
    throw;
  }
  store_->commit_example(ex.id());
  s->example = ex;
  {
    std::unique_lock slots_lock(slots_mutex_);
    slots_.emplace(ex.id(), s);
  }
  return ex;
}

WorkedExample AuthoringService::import_example(const std::string& author,
                                               const nlohmann::json& portable) {
  WorkedExample ex = exchange::import_portable(
      portable, {exchange::IdMode::kFresh, options_.ids->next("ex"), options_.clock()});
  auto s = std::make_shared<Slot>();
  std::lock_guard lock(s->mutex);
  store_->stage_example(ex);
  try {
    log_->append({author, ex.id(), EventKind::kExampleCreated, created_payload(ex, "import")});
  } catch (const InjectedFault&) {
    throw;
  } catch (...) {
    store_->discard_staged(ex.id());
    throw;
  }
  store_->commit_example(ex.id());
  s->example = ex;
  {
    std::unique_lock slots_lock(slots_mutex_);
    slots_.emplace(ex.id(), s);
  }
  return ex;
}

std::vector<WorkedExample> AuthoringService::list_examples() const {
  std::vector<std::shared_ptr<Slot>> all;
  {
    std::shared_lock lock(slots_mutex_);
    for (const auto& [id, s] : slots_) all.push_back(s);
  }
  std::vector<WorkedExample> out;
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    if (s->example) out.push_back(*s->example);
  }
  return out;
}

WorkedExample AuthoringService::get_example(const std::string& id) const {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  if (!s->example) throw_not_found("unknown example '" + id + "'");
  return *s->example;
}

WorkedExample AuthoringService::update_example(const std::string& author, const std::string& id,
                                               std::int64_t expected, const ExamplePatch& patch) {
  if (!patch.title && !patch.problem && !patch.source) {
    throw_validation("nothing to update: give title, problem or source");
  }
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    json fields = json::array();
    if (patch.title || patch.problem) {
      ex.update_details(patch.title.value_or(ex.title()), patch.problem.value_or(ex.problem()),
                        now);
      if (patch.title) fields.push_back("title");
      if (patch.problem) fields.push_back("problem");
    }
    if (patch.source) {
      ex.replace_source(*patch.source, now);
      fields.push_back("source");
    }
    return Change{EventKind::kExampleUpdated,
                  {{"fields", fields}, {"lines", ex.lines().size()}}};
  });
}

void AuthoringService::delete_example(const std::string& author, const std::string& id,
                                      std::int64_t expected) {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  if (!s->example) throw_not_found("unknown example '" + id + "'");
  check_version(s->example->version(), expected, "example");
  log_->append({author, id, EventKind::kExampleDeleted,
                {{"example_version", s->example->version()},
                 {"fragments", s->example->fragment_count()}}});
  store_->remove_example(id);
  s->example.reset();
  engine_->forget_example(id);
  std::unique_lock slots_lock(slots_mutex_);
  slots_.erase(id);
}

WorkedExample AuthoringService::set_explainable(const std::string& author, const std::string& id,
                                                std::int64_t expected, int line,
                                                bool explainable) {
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    ex.set_explainable(line, explainable, now);
    return Change{EventKind::kLineExplainabilityChanged,
                  {{"line", line}, {"explainable", explainable}}};
  });
}

WorkedExample AuthoringService::add_fragment(const std::string& author, const std::string& id,
                                             std::int64_t expected, int line,
                                             const std::string& text) {
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    const auto& f = ex.add_fragment(line, text, Origin::kHuman, now);
    return Change{EventKind::kFragmentAdded,
                  {{"fragment_id", f.id},
                   {"line", line},
                   {"position", f.position},
                   {"origin", to_string(f.origin)},
                   {"text", f.text}}};
  });
}

WorkedExample AuthoringService::edit_fragment(const std::string& author, const std::string& id,
                                              std::int64_t expected,
                                              const std::string& fragment_id,
                                              const std::string& text) {
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    const std::string before = ex.fragment(fragment_id).text;
    const auto& f = ex.edit_fragment(fragment_id, text, now);
    return Change{EventKind::kFragmentEdited,
                  {{"fragment_id", f.id},
                   {"line", ex.line_of(fragment_id)},
                   {"origin", to_string(f.origin)},
                   {"text", f.text},
                   {"changed", before != f.text},
                   {"edit_count", f.edit_count}}};
  });
}

WorkedExample AuthoringService::set_liked(const std::string& author, const std::string& id,
                                          std::int64_t expected, const std::string& fragment_id,
                                          bool liked) {
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    const auto& f = ex.set_liked(fragment_id, liked, now);
    return Change{EventKind::kFragmentLiked,
                  {{"fragment_id", f.id}, {"line", ex.line_of(fragment_id)}, {"liked", f.liked}}};
  });
}

WorkedExample AuthoringService::remove_fragment(const std::string& author, const std::string& id,
                                                std::int64_t expected,
                                                const std::string& fragment_id) {
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    const ExplanationFragment f = ex.fragment(fragment_id);
    const int line = ex.line_of(fragment_id);
    ex.remove_fragment(fragment_id, now);
    return Change{EventKind::kFragmentRemoved,
                  {{"fragment_id", f.id},
                   {"line", line},
                   {"origin", to_string(f.origin)},
                   {"edit_count", f.edit_count}}};
  });
}

WorkedExample AuthoringService::reorder_fragments(const std::string& author,
                                                  const std::string& id, std::int64_t expected,
                                                  int line, const std::vector<std::string>& order) {
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    ex.reorder_fragments(line, order, now);
    return Change{EventKind::kFragmentsReordered, {{"line", line}, {"order", order}}};
  });
}

WorkedExample AuthoringService::merge_fragments(const std::string& author, const std::string& id,
                                                std::int64_t expected, int line,
                                                const std::string& first_id,
                                                const std::string& second_id,
                                                const std::string& separator) {
  return mutate(author, id, expected, [&](WorkedExample& ex, TimestampMs now) {
    const auto& f = ex.merge_fragments(line, first_id, second_id, separator, now);
    json payload = {{"line", line},
                    {"first_id", first_id},
                    {"second_id", second_id},
                    {"origin", to_string(f.origin)},
                    {"text", f.text},
                    {"original_text", nullptr},
                    {"edit_count", f.edit_count}};
    if (f.original_text) payload["original_text"] = *f.original_text;
    return Change{EventKind::kFragmentsMerged, std::move(payload)};
  });
}

std::vector<ProvenanceSummary> AuthoringService::provenance(const std::string& id) const {
  return get_example(id).provenance();
}

review::ReviewSession AuthoringService::checked_session(const std::string& session_id,
                                                        std::int64_t expected) const {
  review::ReviewSession s = engine_->session(session_id);
  check_version(s.version(), expected, "session");
  return s;
}

review::ReviewEngine::Opened AuthoringService::open_dialog(const std::string& author,
                                                           const std::string& example_id) {
  auto s = slot(example_id);
  std::lock_guard lock(s->mutex);
  if (!s->example) throw_not_found("unknown example '" + example_id + "'");
  return engine_->open_dialog(author, *s->example);
}

review::ReviewSession AuthoringService::close_dialog(const std::string& author,
                                                     const std::string& session_id,
                                                     std::int64_t expected) {
  auto s = session_slot(session_id);
  std::lock_guard lock(s->mutex);
  checked_session(session_id, expected);
  engine_->close_dialog(author, session_id);
  return engine_->session(session_id);
}

review::ReviewSession AuthoringService::generate(const std::string& author,
                                                 const std::string& session_id,
                                                 std::int64_t expected,
                                                 const GenerateParams& params) {
  auto s = session_slot(session_id);
  std::optional<WorkedExample> snapshot;
  {
    std::lock_guard lock(s->mutex);
    auto session = checked_session(session_id, expected);
    if (session.state() != review::SessionState::kOpen) {
      throw_conflict("session '" + session_id + "' is " + std::string(to_string(session.state())));
    }
    if (!s->example) throw_not_found("example was deleted");
    snapshot = *s->example;
  }

  const llm::PromptTemplate tmpl =
      params.prompt_template ? llm::PromptTemplate::parse(*params.prompt_template) : *prompt_;
  llm::RenderedPrompt rendered = llm::render_prompt(tmpl, *snapshot);
  llm::GenerationRequest request;
  request.example_id = snapshot->id();
  request.prompt = std::move(rendered.text);
  request.model = params.model.value_or(options_.config.model);
  request.temperature = params.temperature.value_or(options_.config.temperature);
  request.validate();

  llm::GenerationBatch batch;
  {
    SlotGuard guard(generation_slots_);
    batch = gateway_->generate(request, *snapshot);
  }
  for (auto& w : rendered.warnings) batch.warnings.insert(batch.warnings.begin(), "prompt: " + w);
  store_->save_batch(batch);

  std::lock_guard lock(s->mutex);
  checked_session(session_id, expected);
  engine_->record_generation(author, session_id, std::move(batch));
  return engine_->session(session_id);
}

review::ReviewSession AuthoringService::set_line_included(const std::string& author,
                                                          const std::string& session_id,
                                                          std::int64_t expected, int line,
                                                          bool included) {
  auto s = session_slot(session_id);
  std::lock_guard lock(s->mutex);
  checked_session(session_id, expected);
  engine_->set_line_included(author, session_id, line, included);
  return engine_->session(session_id);
}

review::ReviewSession AuthoringService::set_fragment_included(const std::string& author,
                                                              const std::string& session_id,
                                                              std::int64_t expected, int line,
                                                              int index, bool included) {
  auto s = session_slot(session_id);
  std::lock_guard lock(s->mutex);
  checked_session(session_id, expected);
  engine_->set_fragment_included(author, session_id, line, index, included);
  return engine_->session(session_id);
}

review::ReviewSession AuthoringService::toggle_like(const std::string& author,
                                                    const std::string& session_id,
                                                    std::int64_t expected, int line, int index) {
  auto s = session_slot(session_id);
  std::lock_guard lock(s->mutex);
  checked_session(session_id, expected);
  engine_->toggle_like(author, session_id, line, index);
  return engine_->session(session_id);
}

AuthoringService::ApplyOutcome AuthoringService::apply(const std::string& author,
                                                       const std::string& session_id,
                                                       std::int64_t expected) {
  auto s = session_slot(session_id);
  std::lock_guard lock(s->mutex);
  checked_session(session_id, expected);
  if (!s->example) throw_not_found("example was deleted");
  WorkedExample ex = *s->example;
  std::string staged_id;
  review::ReviewEngine::Applied applied;
  try {
    applied = engine_->apply(author, session_id, ex, [&](const WorkedExample& updated) {
      store_->stage_example(updated);
      staged_id = updated.id();
    });
  } catch (const InjectedFault&) {
    throw;
  } catch (...) {
    if (!staged_id.empty()) store_->discard_staged(staged_id);
    throw;
  }
  store_->commit_example(ex.id());
  s->example = ex;
  return {engine_->session(session_id), std::move(ex), std::move(applied.result)};
}

review::ReviewSession AuthoringService::session(const std::string& session_id) const {
  return engine_->session(session_id);
}

nlohmann::json AuthoringService::export_example(const std::string& author, const std::string& id,
                                                ExportFormat format) {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  if (!s->example) throw_not_found("unknown example '" + id + "'");
  json doc = format == ExportFormat::kPcex ? exchange::export_pcex(*s->example)
                                           : exchange::export_portable(*s->example);
  log_->append({author, id, EventKind::kExported,
                {{"format", format == ExportFormat::kPcex ? "pcex" : "portable"},
                 {"fragments", s->example->fragment_count()}}});
  return doc;
}

review::AuthoringReport AuthoringService::authoring_report() const {
  const auto events = log_->snapshot();
  review::AnalyzeOptions opts;
  opts.close_reopen_thresholds_s = options_.config.close_reopen_thresholds_s;
  return review::analyze(events, opts);
}

metrics::CorpusReport AuthoringService::metrics_report() const {
  metrics::DocumentGroup generated{"generated", {}};
  metrics::DocumentGroup final_text{"final", {}};
  for (const auto& ex : list_examples()) {
    std::map<int, std::vector<std::string>> originals;
    std::map<int, std::vector<std::string>> current;
    for (const auto& line : ex.lines()) {
      for (const auto& f : line.fragments) {
        current[line.number].push_back(f.text);
        if (f.origin == Origin::kGenerated && f.original_text) {
          originals[line.number].push_back(*f.original_text);
        }
      }
    }
    if (!originals.empty()) generated.documents.push_back(metrics::merge_source_document(originals));
    if (!current.empty()) final_text.documents.push_back(metrics::merge_source_document(current));
  }
  std::vector<metrics::DocumentGroup> groups;
  if (!generated.documents.empty()) groups.push_back(std::move(generated));
  if (!final_text.documents.empty()) groups.push_back(std::move(final_text));
  return metrics::corpus_report(groups, *stopwords_);
}

nlohmann::json example_json(const WorkedExample& example) {
  json doc = exchange::export_portable(example, true);
  for (std::size_t i = 0; i < example.lines().size(); ++i) {
    doc["lines"][i]["kind"] = to_string(example.lines()[i].kind);
  }
  doc["explainable_lines"] = example.explainable_lines();
  doc["fragment_count"] = example.fragment_count();
  return doc;
}

nlohmann::json session_json(const review::ReviewSession& session) {
  json doc = {{"id", session.id()},
              {"example_id", session.example_id()},
              {"author_id", session.author_id()},
              {"state", to_string(session.state())},
              {"version", session.version()},
              {"batch", nullptr}};
  if (const auto& b = session.batch()) {
    json lines = json::array();
    for (const auto& [line, texts] : b->candidates) {
      json frags = json::array();
      for (std::size_t i = 0; i < texts.size(); ++i) {
        const int idx = static_cast<int>(i);
        frags.push_back({{"index", idx},
                         {"text", texts[i]},
                         {"included", session.fragment_included(line, idx)},
                         {"liked", session.fragment_liked(line, idx)}});
      }
      lines.push_back({{"line", line},
                       {"included", session.line_included(line)},
                       {"fragments", std::move(frags)}});
    }
    doc["batch"] = {{"id", b->id},
                    {"model", b->request.model},
                    {"temperature", b->request.temperature},
                    {"created_at", format_iso8601(b->created_at)},
                    {"parse_failed", b->parse_failed},
                    {"parse_error", b->parse_error},
                    {"warnings", b->warnings},
                    {"candidates", b->candidate_count()},
                    {"mean_per_line", b->mean_per_line()},
                    {"lines", std::move(lines)}};
  }
  return doc;
}

nlohmann::json provenance_json(const std::vector<ProvenanceSummary>& rows) {
  json items = json::array();
  for (const auto& r : rows) {
    items.push_back({{"fragment_id", r.fragment_id},
                     {"line", r.line_number},
                     {"origin", to_string(r.origin)},
                     {"levenshtein_ratio", r.levenshtein_ratio}});
  }
  return {{"fragments", std::move(items)}, {"mean_ratio", mean_ratio(rows)}};
}

}  // namespace coex::service
