#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <sstream>

#include "ltg/cli.hpp"
#include "ltg/error.hpp"
#include "support.hpp"

using namespace ltg;
using namespace ltg::testing;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_ltg(const std::string& args) {
  const std::string command = std::string(LTG_BINARY) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run run;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) run.out.append(buf, n);
  const int status = pclose(pipe);
  run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return run;
}

struct Fixture {
  TempDir dir;
  std::string embeddings = dir.file("vectors.txt");
  AnalysisConfig config;

  Fixture() {
    write_file(embeddings, glove_text(300, 16, 1));
    config.embeddings_path = embeddings;
  }
};

}  // namespace

TEST_CASE("cmd_analyze prints a json report") {
  Fixture f;
  write_file(f.dir.file("a.txt"), word_text(5000, 300, 2));
  std::ostringstream out, err;
  REQUIRE(cli::cmd_analyze(f.dir.file("a.txt"), f.config, out, err) == cli::kExitOk);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["n_tokens"] == 5000);
  CHECK(j["embedding_name"] == "vectors");
  CHECK(j["gapelmaper"].get<double>() > 0.0);
  CHECK(err.str().empty());
}

TEST_CASE("cmd_analyze exit codes") {
  Fixture f;
  std::ostringstream out, err;
  CHECK(cli::cmd_analyze(f.dir.file("missing.txt"), f.config, out, err) == cli::kExitIo);
  CHECK(!err.str().empty());

  write_file(f.dir.file("tiny.txt"), word_text(150, 300, 3));
  std::ostringstream err2;
  CHECK(cli::cmd_analyze(f.dir.file("tiny.txt"), f.config, out, err2) == cli::kExitMetric);
  CHECK(err2.str().find("text too short") != std::string::npos);

  auto no_embeddings = f.config;
  no_embeddings.embeddings_path = f.dir.file("nope.txt");
  write_file(f.dir.file("ok.txt"), word_text(1000, 300, 3));
  CHECK(cli::cmd_analyze(f.dir.file("ok.txt"), no_embeddings, out, err) == cli::kExitIo);

  auto bad_range = f.config;
  bad_range.tau_min = 500;
  bad_range.tau_max = 100;
  CHECK(cli::cmd_analyze(f.dir.file("ok.txt"), bad_range, out, err) == cli::kExitIo);
}

TEST_CASE("embeddings path falls back to LTG_EMBEDDINGS") {
  AnalysisConfig config;
  setenv("LTG_EMBEDDINGS", "/from/env.txt", 1);
  CHECK(cli::resolve_embeddings_path(config) == "/from/env.txt");
  config.embeddings_path = "/from/flag.txt";
  CHECK(cli::resolve_embeddings_path(config) == "/from/flag.txt");
  unsetenv("LTG_EMBEDDINGS");
  CHECK(cli::resolve_embeddings_path(AnalysisConfig{}).empty());
}

TEST_CASE("corpus rows are sorted, isolated, and match analyze") {
  Fixture f;
  const auto corpus = f.dir.path() / "corpus";
  std::filesystem::create_directories(corpus);
  write_file((corpus / "b.txt").string(), word_text(4000, 300, 4));
  write_file((corpus / "a.txt").string(), word_text(3000, 300, 5));
  write_file((corpus / "c_short.txt").string(), word_text(100, 300, 6));
  write_file((corpus / ".hidden").string(), "ignored");

  const auto rows = cli::score_corpus(corpus.string(), f.config);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].name == "a.txt");
  CHECK(rows[1].name == "b.txt");
  CHECK(rows[2].name == "c_short.txt");
  CHECK(rows[0].report);
  CHECK(rows[1].report);
  CHECK(!rows[2].report);
  CHECK(rows[2].error.find("TextTooShort") == 0);

  std::ostringstream out, err;
  REQUIRE(cli::cmd_analyze((corpus / "b.txt").string(), f.config, out, err) == 0);
  const auto single = nlohmann::json::parse(out.str());
  CHECK(single["gapelmaper"].get<double>() == rows[1].report->gapelmaper);
  CHECK(single["mape_power"].get<double>() == rows[1].report->mape_power);

  const auto csv = cli::format_corpus(rows, OutputFormat::Csv);
  CHECK(csv.rfind("name,mape_power,mape_exp,gapelmaper,error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const auto table = cli::format_corpus(rows, OutputFormat::Table);
  CHECK(table.find("error: TextTooShort") != std::string::npos);
}

TEST_CASE("corpus over an empty directory fails with exit 1") {
  Fixture f;
  const auto empty = f.dir.path() / "empty";
  std::filesystem::create_directories(empty);
  std::ostringstream out, err;
  CHECK(cli::cmd_corpus(empty.string(), f.config, out, err) == cli::kExitIo);
  CHECK(cli::cmd_corpus(f.dir.file("nowhere"), f.config, out, err) == cli::kExitIo);
}

TEST_CASE("curve emits tau_max rows") {
  Fixture f;
  std::string constant;
  for (int i = 0; i < 1000; ++i) constant += "w7 ";
  write_file(f.dir.file("constant.txt"), constant);
  std::ostringstream out, err;
  REQUIRE(cli::cmd_curve(f.dir.file("constant.txt"), f.config, out, err) == 0);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "tau,c");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const double c = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(c - 1.0) < 1e-12);
  }
  CHECK(rows == 500);

  write_file(f.dir.file("words.txt"), word_text(3000, 300, 9));
  std::ostringstream out2;
  REQUIRE(cli::cmd_curve(f.dir.file("words.txt"), f.config, out2, err) == 0);
  const auto csv = out2.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 1500);
}

TEST_CASE("ltg binary: formats, exit codes, byte-identical reruns") {
  Fixture f;
  write_file(f.dir.file("text.txt"), word_text(6000, 300, 10));
  const std::string emb = " --embeddings " + f.embeddings;
  const auto first = run_ltg("analyze " + f.dir.file("text.txt") + emb);
  const auto second = run_ltg("analyze " + f.dir.file("text.txt") + emb);
  CHECK(first.code == 0);
  CHECK(!first.out.empty());
  CHECK(first.out == second.out);

  const auto table = run_ltg("analyze --format table " + f.dir.file("text.txt") + emb);
  CHECK(table.code == 0);
  CHECK(table.out.find("GAPELMAPER") != std::string::npos);

  CHECK(run_ltg("analyze " + f.dir.file("missing.txt") + emb).code == 1);
  write_file(f.dir.file("tiny.txt"), word_text(150, 300, 3));
  CHECK(run_ltg("analyze " + f.dir.file("tiny.txt") + emb).code == 2);
  CHECK(run_ltg("analyze --grid weird " + f.dir.file("text.txt") + emb).code == 1);
  CHECK(run_ltg("").code == 1);
}
