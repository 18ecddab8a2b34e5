#include "ltg/analysis.hpp"

#include <fmt/format.h>

#include "ltg/error.hpp"

namespace ltg {

std::string_view to_string(OutputFormat format) noexcept {
  switch (format) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Table: return "table";
  }
  return "json";
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  if (text == "table") return OutputFormat::Table;
  throw Error(ErrorCode::InvalidArgument,
              "unknown output format '" + std::string(text) + "' (expected json, csv or table)");
}

void AnalysisConfig::validate() const {
  if (tau_min < 1 || tau_min >= tau_max) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("invalid lag range: need 1 <= tau_min < tau_max, got {} and {}",
                            tau_min, tau_max));
  }
}

std::size_t effective_tau_max(std::size_t n_vectors, const AnalysisConfig& config) {
  config.validate();
  const std::size_t tau_max = std::min(config.tau_max, n_vectors / 2);
  if (tau_max < 10 * config.tau_min) {
    throw Error(ErrorCode::TextTooShort,
                fmt::format("text too short: {} embedded words give a largest lag of {}, "
                            "need at least {}",
                            n_vectors, tau_max, 10 * config.tau_min));
  }
  return tau_max;
}

AutocorrelationCurve text_curve(const UnitVectorSequence& seq, const AnalysisConfig& config) {
  return autocorrelation_fft(seq, effective_tau_max(seq.size(), config));
}

GapelmaperReport analyze_sequence(const UnitVectorSequence& seq, const AnalysisConfig& config) {
  const auto curve = text_curve(seq, config);
  const auto selection = select_fit_lags(curve, config.tau_min, curve.max_lag(), config.grid_mode);
  auto report = gapelmaper(fit_power_law(curve, selection), fit_exponential_law(curve, selection));
  report.n_vectors = seq.size();
  report.tau_min = config.tau_min;
  report.tau_max = curve.max_lag();
  report.grid_mode = config.grid_mode;
  report.dropped_oov_fraction = seq.dropped_oov_fraction();
  report.dropped_nonpositive_fraction = selection.dropped_nonpositive_fraction;
  return report;
}

GapelmaperReport analyze_text(std::string_view raw_text, const EmbeddingTable& table,
                              const AnalysisConfig& config) {
  config.validate();
  const auto tokens = tokenize(raw_text);
  const auto seq = embed_sequence(tokens, table);
  auto report = analyze_sequence(seq, config);
  report.n_tokens = tokens.size();
  report.embedding_name = table.name();
  return report;
}

nlohmann::ordered_json to_json(const GapelmaperReport& r) {
  return nlohmann::ordered_json{
      {"mape_power", r.mape_power},
      {"mape_exp", r.mape_exp},
      {"gapelmaper", r.gapelmaper},
      {"degenerate", r.degenerate},
      {"n_tokens", r.n_tokens},
      {"n_vectors", r.n_vectors},
      {"tau_min", r.tau_min},
      {"tau_max", r.tau_max},
      {"grid_mode", to_string(r.grid_mode)},
      {"dropped_oov_fraction", r.dropped_oov_fraction},
      {"dropped_nonpositive_fraction", r.dropped_nonpositive_fraction},
      {"embedding_name", r.embedding_name},
  };
}

std::string format_report(const GapelmaperReport& r, OutputFormat format) {
  switch (format) {
    case OutputFormat::Json:
      return to_json(r).dump(2) + "\n";
    case OutputFormat::Csv:
      return fmt::format(
          "mape_power,mape_exp,gapelmaper,degenerate,n_tokens,n_vectors,tau_min,tau_max,"
          "grid_mode,dropped_oov_fraction,dropped_nonpositive_fraction,embedding_name\n"
          "{},{},{},{},{},{},{},{},{},{},{},{}\n",
          r.mape_power, r.mape_exp, r.gapelmaper, r.degenerate, r.n_tokens, r.n_vectors,
          r.tau_min, r.tau_max, to_string(r.grid_mode), r.dropped_oov_fraction,
          r.dropped_nonpositive_fraction, r.embedding_name);
    case OutputFormat::Table: {
      std::string out;
      auto row = [&out](std::string_view key, const std::string& value) {
        out += fmt::format("{:<30} {}\n", key, value);
      };
      row("power law MAPE", fmt::format("{:.3f}", r.mape_power));
      row("exp law MAPE", fmt::format("{:.3f}", r.mape_exp));
      row("GAPELMAPER", format_gapelmaper(r.gapelmaper) + (r.degenerate ? " (degenerate)" : ""));
      row("tokens", std::to_string(r.n_tokens));
      row("embedded vectors", std::to_string(r.n_vectors));
      row("lag range", fmt::format("{}..{} ({})", r.tau_min, r.tau_max, to_string(r.grid_mode)));
      row("dropped OOV fraction", fmt::format("{:.4f}", r.dropped_oov_fraction));
      row("dropped C<=0 fraction", fmt::format("{:.4f}", r.dropped_nonpositive_fraction));
      row("embeddings", r.embedding_name);
      return out;
    }
  }
  return {};
}

std::string format_curve_csv(const AutocorrelationCurve& curve) {
  std::string out = "tau,c\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += fmt::format("{},{}\n", curve.lags[i], curve.values[i]);
  }
  return out;
}

}  // namespace ltg
