#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ltg/autocorrelation.hpp"
#include "ltg/embedding.hpp"
#include "ltg/lawfit.hpp"

namespace ltg {

enum class OutputFormat { Json, Csv, Table };

std::string_view to_string(OutputFormat format) noexcept;
OutputFormat parse_output_format(std::string_view text);

struct AnalysisConfig {
  std::string embeddings_path;
  std::size_t tau_min = 10;
  std::size_t tau_max = 10000;
  GridMode grid_mode = GridMode::Geometric20;
  OutputFormat output_format = OutputFormat::Json;

  /// Throws Error(InvalidArgument) unless 1 <= tau_min < tau_max.
  void validate() const;
};

/// Largest lag used for a sequence of `n_vectors`: min(tau_max, n/2).
/// Throws Error(TextTooShort) when that leaves less than one decade above
/// tau_min (N < 200 with the defaults).
std::size_t effective_tau_max(std::size_t n_vectors, const AnalysisConfig& config);

/// Autocorrelation curve over lags 1..effective_tau_max.
AutocorrelationCurve text_curve(const UnitVectorSequence& seq, const AnalysisConfig& config);

/// Fits both laws to an already embedded sequence. n_tokens and
/// embedding_name are left for the caller.
GapelmaperReport analyze_sequence(const UnitVectorSequence& seq, const AnalysisConfig& config);

/// tokenize -> embed -> autocorrelation -> lag grid -> both fits -> ratio.
GapelmaperReport analyze_text(std::string_view raw_text, const EmbeddingTable& table,
                              const AnalysisConfig& config);

nlohmann::ordered_json to_json(const GapelmaperReport& report);

/// Renders one report in the requested format, newline-terminated.
std::string format_report(const GapelmaperReport& report, OutputFormat format);

/// Curve as `tau,c` CSV with header.
std::string format_curve_csv(const AutocorrelationCurve& curve);

}  // namespace ltg
