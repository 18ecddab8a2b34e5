// ltg: GAPELMAPER text-structuredness metric and challenge service.
#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "ltg/cli.hpp"
#include "ltg/error.hpp"
#include "ltg/http_api.hpp"

namespace {

ltg::challenge::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

void add_analysis_flags(CLI::App* cmd, ltg::AnalysisConfig& config, std::string& grid,
                        std::string& format) {
  cmd->add_option("--embeddings", config.embeddings_path,
                  "GloVe text-format embeddings (default: $LTG_EMBEDDINGS)");
  cmd->add_option("--tau-min", config.tau_min, "smallest fitted lag")->capture_default_str();
  cmd->add_option("--tau-max", config.tau_max, "largest lag (capped at N/2)")->capture_default_str();
  cmd->add_option("--grid", grid, "lag grid: geometric20 or all")
      ->check(CLI::IsMember({"geometric20", "all"}))
      ->capture_default_str();
  cmd->add_option("--format", format, "output format: json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
}

int run_serve(ltg::AnalysisConfig config, const std::string& prompts_path,
              const std::string& log_path, ltg::challenge::ServiceConfig service_config,
              ltg::challenge::ServerOptions options) {
  using namespace ltg::challenge;
  try {
    const auto embeddings = ltg::cli::resolve_embeddings_path(config);
    if (embeddings.empty()) {
      std::cerr << "ltg: no embeddings given: pass --embeddings or set LTG_EMBEDDINGS\n";
      return ltg::cli::kExitIo;
    }
    std::cerr << "loading embeddings from " << embeddings << "\n";
    auto table = std::make_shared<const ltg::EmbeddingTable>(ltg::load_embedding_file(embeddings));
    service_config.analysis = config;
    ChallengeService service(service_config, load_prompts(prompts_path), table, EventLog(log_path));
    const char* token = std::getenv("LTG_ADMIN_TOKEN");
    Api api(service, token ? token : "");
    HttpServer server(api, options);
    const int port = server.bind();
    if (port < 0) {
      std::cerr << "ltg: cannot bind " << options.host << ":" << options.port << "\n";
      return ltg::cli::kExitIo;
    }
    std::cerr << "serving on http://" << options.host << ":" << port << " (phase "
              << to_string(service.phase()) << ")\n";
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    server.run();
    g_server = nullptr;
    return ltg::cli::kExitOk;
  } catch (const ltg::Error& e) {
    std::cerr << "ltg: " << ltg::error_code_name(e.code()) << ": " << e.what() << "\n";
    return ltg::cli::kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAPELMAPER long-text structuredness metric and challenge service"};
  app.require_subcommand(1);

  ltg::AnalysisConfig config;
  std::string grid = "geometric20";
  std::string format = "json";
  std::string path;

  auto* analyze = app.add_subcommand("analyze", "score one text file");
  analyze->add_option("file", path, "UTF-8 text file")->required();
  add_analysis_flags(analyze, config, grid, format);

  auto* corpus = app.add_subcommand("corpus", "score every file in a directory");
  corpus->add_option("directory", path, "directory of UTF-8 text files")->required();
  add_analysis_flags(corpus, config, grid, format);

  auto* curve = app.add_subcommand("curve", "print the autocorrelation curve as tau,c CSV");
  curve->add_option("file", path, "UTF-8 text file")->required();
  add_analysis_flags(curve, config, grid, format);

  std::string prompts_path;
  std::string log_path = "ltg-events.ndjson";
  ltg::challenge::ServiceConfig service_config;
  ltg::challenge::ServerOptions server_options;
  auto* serve = app.add_subcommand("serve", "run the challenge HTTP service");
  serve->add_option("--prompts", prompts_path, "prompt registry JSON")->required();
  serve->add_option("--log", log_path, "append-only event log")->capture_default_str();
  serve->add_option("--host", server_options.host)->capture_default_str();
  serve->add_option("--port", server_options.port)->capture_default_str();
  serve->add_option("--ui", server_options.static_dir, "static judge UI directory served at /");
  serve->add_option("--min-tokens", service_config.min_tokens)->capture_default_str();
  serve->add_option("--max-tokens", service_config.max_tokens)->capture_default_str();
  serve->add_option("--workers", service_config.scoring_workers, "concurrent scoring jobs")
      ->capture_default_str();
  add_analysis_flags(serve, config, grid, format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ltg::cli::kExitIo;
  }

  config.grid_mode = ltg::parse_grid_mode(grid);
  config.output_format = ltg::parse_output_format(format);

  if (*analyze) return ltg::cli::cmd_analyze(path, config, std::cout, std::cerr);
  if (*corpus) return ltg::cli::cmd_corpus(path, config, std::cout, std::cerr);
  if (*curve) return ltg::cli::cmd_curve(path, config, std::cout, std::cerr);
  return run_serve(config, prompts_path, log_path, service_config, server_options);
}
