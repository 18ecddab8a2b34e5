#include "ltg/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ltg/error.hpp"

namespace ltg::cli {

namespace fs = std::filesystem;

namespace {

std::unordered_set<std::string> vocabulary_of(const std::vector<std::string>& texts) {
  std::unordered_set<std::string> vocab;
  for (const auto& text : texts) {
    for (auto& tok : tokenize(text).tokens) vocab.insert(std::move(tok));
  }
  return vocab;
}

EmbeddingTable load_for(const AnalysisConfig& config, const std::vector<std::string>& texts) {
  const auto path = resolve_embeddings_path(config);
  if (path.empty()) {
    throw Error(ErrorCode::Io, "no embeddings given: pass --embeddings or set LTG_EMBEDDINGS");
  }
  const auto vocab = vocabulary_of(texts);
  return load_embedding_file(path, &vocab);
}

int report_error(const Error& e, std::ostream& err) {
  err << "ltg: " << error_code_name(e.code()) << ": " << e.what() << "\n";
  return e.is_metric_error() ? kExitMetric : kExitIo;
}

// Runs `body`, mapping library errors onto the exit-code taxonomy.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const std::exception& e) {
    err << "ltg: " << e.what() << "\n";
    return kExitIo;
  }
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string resolve_embeddings_path(const AnalysisConfig& config) {
  if (!config.embeddings_path.empty()) return config.embeddings_path;
  if (const char* env = std::getenv("LTG_EMBEDDINGS")) return env;
  return {};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read error on '" + path + "'");
  return std::move(buf).str();
}

std::vector<CorpusRow> score_corpus(const std::string& directory, const AnalysisConfig& config) {
  config.validate();
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorCode::Io, "'" + directory + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && !name.starts_with(".")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::Io, "no text files in '" + directory + "'");

  std::vector<CorpusRow> rows(files.size());
  std::vector<std::string> texts(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    rows[i].name = files[i].filename().string();
    try {
      texts[i] = read_text_file(files[i].string());
    } catch (const Error& e) {
      rows[i].error = fmt::format("{}: {}", error_code_name(e.code()), e.what());
    }
  }
  const auto table = load_for(config, texts);

  // Rows are written by index, so output order does not depend on scheduling.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rows.size()); ++ii) {
    auto& row = rows[static_cast<std::size_t>(ii)];
    if (!row.error.empty()) continue;
    try {
      row.report = analyze_text(texts[static_cast<std::size_t>(ii)], table, config);
    } catch (const Error& e) {
      row.error = fmt::format("{}: {}", error_code_name(e.code()), e.what());
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

std::string format_corpus(const std::vector<CorpusRow>& rows, OutputFormat format) {
  std::string out;
  switch (format) {
    case OutputFormat::Json: {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& row : rows) {
        nlohmann::ordered_json j{{"name", row.name}};
        if (row.report) {
          j["mape_power"] = row.report->mape_power;
          j["mape_exp"] = row.report->mape_exp;
          j["gapelmaper"] = row.report->gapelmaper;
        } else {
          j["error"] = row.error;
        }
        arr.push_back(std::move(j));
      }
      return arr.dump(2) + "\n";
    }
    case OutputFormat::Csv:
      out = "name,mape_power,mape_exp,gapelmaper,error\n";
      for (const auto& row : rows) {
        if (row.report) {
          out += fmt::format("{},{},{},{},\n", csv_escape(row.name), row.report->mape_power,
                             row.report->mape_exp, row.report->gapelmaper);
        } else {
          out += fmt::format("{},,,,{}\n", csv_escape(row.name), csv_escape(row.error));
        }
      }
      return out;
    case OutputFormat::Table: {
      std::size_t width = 4;
      for (const auto& row : rows) width = std::max(width, row.name.size());
      out = fmt::format("{:<{}}  {:>12}  {:>12}  {:>10}\n", "text", width, "power MAPE",
                        "exp MAPE", "GAPELMAPER");
      for (const auto& row : rows) {
        if (row.report) {
          out += fmt::format("{:<{}}  {:>12.3f}  {:>12.3f}  {:>10}\n", row.name, width,
                             row.report->mape_power, row.report->mape_exp,
                             format_gapelmaper(row.report->gapelmaper));
        } else {
          out += fmt::format("{:<{}}  error: {}\n", row.name, width, row.error);
        }
      }
      return out;
    }
  }
  return out;
}

int cmd_analyze(const std::string& file_path, const AnalysisConfig& config, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const auto text = read_text_file(file_path);
    const auto table = load_for(config, {text});
    out << format_report(analyze_text(text, table, config), config.output_format);
    return kExitOk;
  });
}

int cmd_corpus(const std::string& directory, const AnalysisConfig& config, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    out << format_corpus(score_corpus(directory, config), config.output_format);
    return kExitOk;
  });
}

int cmd_curve(const std::string& file_path, const AnalysisConfig& config, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const auto text = read_text_file(file_path);
    const auto table = load_for(config, {text});
    const auto seq = embed_sequence(tokenize(text), table);
    out << format_curve_csv(text_curve(seq, config));
    return kExitOk;
  });
}

}  // namespace ltg::cli
