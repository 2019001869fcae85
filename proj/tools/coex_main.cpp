// coex: authoring service and offline tools.
//
//   coex serve   --data-dir DIR [--port N] [--provider mock|http] [--config FILE]
//   coex export  --data-dir DIR --id ID [--format portable|pcex] [--out FILE]
//   coex metrics corpus --dir LABEL=PATH ... [--format json|csv]
//   coex report  (--data-dir DIR | --log FILE) [--threshold S ...] [--format json|text]

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coex/error.hpp"
#include "coex/exchange.hpp"
#include "coex/llm/provider.hpp"
#include "coex/metrics/embedding.hpp"
#include "coex/metrics/report.hpp"
#include "coex/review/analytics.hpp"
#include "coex/review/event_log.hpp"
#include "coex/service/authoring_service.hpp"
#include "coex/service/http_api.hpp"

namespace fs = std::filesystem;
using namespace coex;

namespace {

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write '" + out + "'");
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

struct ServeArgs {
  std::string data_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string provider = "mock";
  std::string config;
};

int run_serve(const ServeArgs& a) {
  service::ServiceConfig config;
  if (!a.config.empty()) config = service::load_config(a.config);
  service::apply_env(config, service::process_env());

  service::ServiceOptions opts;
  if (a.provider == "mock") {
    if (config.mock.fixture_path) {
      opts.provider = llm::MockProvider::from_fixture_file(*config.mock.fixture_path);
    } else {
      llm::MockProvider::Options m;
      m.seed = config.mock.seed;
      m.fragments_per_line = config.mock.fragments_per_line;
      opts.provider = std::make_shared<llm::MockProvider>(m);
    }
  } else {
    if (config.api_key.empty()) {
      std::cerr << "warning: " << config.api_key_env << " is not set\n";
    }
    llm::HttpChatProvider::Options h;
    h.base_url = config.base_url;
    h.api_key = config.api_key;
    h.timeout = std::chrono::seconds(config.request_timeout_s);
    opts.provider = std::make_shared<llm::HttpChatProvider>(h);
  }
  opts.config = config;

  service::AuthoringService svc(a.data_dir, std::move(opts));
  const auto& r = svc.recovery();
  if (!r.clean()) {
    std::cerr << "recovered store: truncated " << r.truncated_bytes << " bytes, rolled forward "
              << r.rolled_forward.size() << ", rolled back " << r.rolled_back.size() << "\n";
  }
  service::HttpServer server(svc);
  const int port = server.bind(a.host, a.port);
  if (port < 0) {
    std::cerr << "error: cannot bind " << a.host << ":" << a.port << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << a.host << ":" << port << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

int run_export(const std::string& data_dir, const std::string& id, const std::string& format,
               const std::string& out) {
  service::require_safe_id(id);
  const fs::path path = fs::path(data_dir) / "examples" / (id + ".json");
  if (!fs::exists(path)) throw_not_found("no example '" + id + "' in " + data_dir);
  auto ex = exchange::import_portable(nlohmann::json::parse(slurp(path)),
                                      {exchange::IdMode::kPreserve, {}, 0});
  auto fmt = service::parse_export_format(format);
  if (!fmt) throw_validation("--format must be portable or pcex");
  auto doc = *fmt == service::ExportFormat::kPcex ? exchange::export_pcex(ex)
                                                  : exchange::export_portable(ex);
  emit(doc.dump(2), out);
  return 0;
}

std::vector<std::string> corpus_documents(const fs::path& path) {
  std::vector<std::string> docs;
  if (fs::is_regular_file(path)) {
    docs.push_back(slurp(path));
    return docs;
  }
  if (!fs::is_directory(path)) throw Error(ErrorKind::kIo, "no such file or directory: " + path.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) docs.push_back(slurp(f));
  if (docs.empty()) throw_validation(path.string() + ": no .txt documents");
  return docs;
}

int run_metrics(const std::vector<std::string>& dirs, const std::string& format,
                const std::string& stopwords, bool embeddings, const std::string& out) {
  std::vector<metrics::DocumentGroup> groups;
  for (const auto& spec : dirs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw_validation("--dir expects LABEL=PATH, got '" + spec + "'");
    groups.push_back({spec.substr(0, eq), corpus_documents(spec.substr(eq + 1))});
  }
  auto sw = stopwords.empty() ? metrics::StopwordList::builtin()
                              : metrics::StopwordList::load_file(stopwords);
  metrics::HashingEmbedder embedder;
  auto report = metrics::corpus_report(groups, *sw, embeddings ? &embedder : nullptr);
  emit(format == "csv" ? metrics::to_csv(report) : metrics::to_json(report).dump(2), out);
  return 0;
}

int run_report(const std::string& data_dir, const std::string& log, std::vector<double> thresholds,
               const std::string& format, const std::string& out) {
  fs::path path;
  if (!log.empty()) {
    path = log;
    if (!fs::is_regular_file(path)) throw Error(ErrorKind::kIo, "no such log file: " + log);
  } else {
    if (!fs::is_directory(data_dir)) throw Error(ErrorKind::kIo, "no such data directory: " + data_dir);
    path = fs::path(data_dir) / "events.ndjson";
  }
  std::vector<review::AuthoringEvent> events;
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    auto read = review::read_ndjson(in, /*tolerate_torn_tail=*/true);
    if (read.truncated_tail) std::cerr << "warning: ignoring a torn final record\n";
    events = std::move(read.events);
  }
  review::AnalyzeOptions opts;
  if (!thresholds.empty()) opts.close_reopen_thresholds_s = std::move(thresholds);
  auto report = review::analyze(events, opts);
  emit(format == "text" ? review::to_text(report) : review::to_json(report).dump(2), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coex: co-authoring of worked programming examples"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP authoring service");
  serve_cmd->add_option("--data-dir", serve.data_dir, "Store directory")->required();
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--provider", serve.provider, "LLM provider")
      ->check(CLI::IsMember({"mock", "http"}));
  serve_cmd->add_option("--config", serve.config, "JSON config file")->check(CLI::ExistingFile);

  std::string exp_dir, exp_id, exp_format = "portable", exp_out;
  auto* export_cmd = app.add_subcommand("export", "Export a stored example");
  export_cmd->add_option("--data-dir", exp_dir, "Store directory")->required()->check(CLI::ExistingDirectory);
  export_cmd->add_option("--id", exp_id, "Example id")->required();
  export_cmd->add_option("--format", exp_format, "portable or pcex")
      ->check(CLI::IsMember({"portable", "pcex"}));
  export_cmd->add_option("--out", exp_out, "Output file (default stdout)");

  auto* metrics_cmd = app.add_subcommand("metrics", "Text metrics");
  metrics_cmd->require_subcommand(1);
  std::vector<std::string> corpus_dirs;
  std::string corpus_format = "json", corpus_stopwords, corpus_out;
  bool corpus_embeddings = false;
  auto* corpus_cmd = metrics_cmd->add_subcommand("corpus", "Lexical/readability medians and similarity");
  corpus_cmd->add_option("--dir", corpus_dirs, "LABEL=PATH (directory of .txt files or one file)")
      ->required();
  corpus_cmd->add_option("--format", corpus_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  corpus_cmd->add_option("--stopwords", corpus_stopwords, "Stopword file")->check(CLI::ExistingFile);
  corpus_cmd->add_flag("--embeddings", corpus_embeddings, "Add hashing-embedder cosine/BERTScore columns");
  corpus_cmd->add_option("--out", corpus_out, "Output file (default stdout)");

  std::string rep_dir, rep_log, rep_format = "json", rep_out;
  std::vector<double> rep_thresholds;
  auto* report_cmd = app.add_subcommand("report", "Authoring report from an event log");
  auto* rep_dir_opt = report_cmd->add_option("--data-dir", rep_dir, "Store directory");
  auto* rep_log_opt = report_cmd->add_option("--log", rep_log, "events.ndjson file");
  rep_dir_opt->excludes(rep_log_opt);
  report_cmd->add_option("--threshold", rep_thresholds, "Close-reopen threshold in seconds (repeatable)");
  report_cmd->add_option("--format", rep_format, "json or text")->check(CLI::IsMember({"json", "text"}));
  report_cmd->add_option("--out", rep_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve_cmd->parsed()) return run_serve(serve);
    if (export_cmd->parsed()) return run_export(exp_dir, exp_id, exp_format, exp_out);
    if (corpus_cmd->parsed()) {
      return run_metrics(corpus_dirs, corpus_format, corpus_stopwords, corpus_embeddings, corpus_out);
    }
    if (report_cmd->parsed()) {
      if (rep_dir.empty() && rep_log.empty()) {
        std::cerr << "error: report needs --data-dir or --log\n";
        return 2;
      }
      return run_report(rep_dir, rep_log, rep_thresholds, rep_format, rep_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
