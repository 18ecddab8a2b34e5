#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ltg/analysis.hpp"

namespace ltg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;      // usage and I/O failures
inline constexpr int kExitMetric = 2;  // the text cannot be scored

/// Flag value, else $LTG_EMBEDDINGS, else empty.
std::string resolve_embeddings_path(const AnalysisConfig& config);

std::string read_text_file(const std::string& path);

struct CorpusRow {
  std::string name;
  std::optional<GapelmaperReport> report;
  std::string error;  // error code name and message when report is empty
};

/// Scores every regular, non-hidden file in `directory` in sorted-name order.
/// Per-file failures become rows carrying the error.
std::vector<CorpusRow> score_corpus(const std::string& directory, const AnalysisConfig& config);

std::string format_corpus(const std::vector<CorpusRow>& rows, OutputFormat format);

int cmd_analyze(const std::string& file_path, const AnalysisConfig& config, std::ostream& out,
                std::ostream& err);
int cmd_corpus(const std::string& directory, const AnalysisConfig& config, std::ostream& out,
               std::ostream& err);
int cmd_curve(const std::string& file_path, const AnalysisConfig& config, std::ostream& out,
              std::ostream& err);

}  // namespace ltg::cli
