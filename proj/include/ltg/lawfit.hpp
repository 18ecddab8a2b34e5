#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ltg/autocorrelation.hpp"

namespace ltg {

enum class GridMode {
  Geometric20,  // 20 log-spaced lags per decade
  All,          // every integer lag
};

std::string_view to_string(GridMode mode) noexcept;
/// Accepts "geometric20" and "all"; throws Error(InvalidArgument) otherwise.
GridMode parse_grid_mode(std::string_view text);

/// Lags used by both fits. Every lag has C(tau) > 0.
struct LagSelection {
  std::vector<std::size_t> lags;
  GridMode grid_mode = GridMode::Geometric20;
  double dropped_nonpositive_fraction = 0.0;
};

/// Builds the fitting grid over [tau_min, tau_max] and removes lags whose
/// C(tau) is not positive. Throws Error(InsufficientPositiveLags) unless at
/// least 10 lags spanning a decade survive.
LagSelection select_fit_lags(const AutocorrelationCurve& curve, std::size_t tau_min,
                             std::size_t tau_max, GridMode grid_mode);

enum class Law { Power, Exponential };

std::string_view to_string(Law law) noexcept;

/// Straight-line fit of ln C against ln tau (power) or tau (exponential).
struct LawFit {
  Law law = Law::Power;
  double intercept = 0.0;
  double slope = 0.0;
  double mape = 0.0;  // mean |C - fit| / |C|, as a fraction
  std::size_t n_points = 0;

  double predict(double tau) const noexcept;
};

LawFit fit_power_law(const AutocorrelationCurve& curve, const LagSelection& selection);
LawFit fit_exponential_law(const AutocorrelationCurve& curve, const LagSelection& selection);

/// MAPEs at or below this are treated as exact fits by the degeneracy rule.
inline constexpr double kExactFitMape = 1e-12;

struct GapelmaperReport {
  double mape_power = 0.0;
  double mape_exp = 0.0;
  double gapelmaper = 0.0;
  // Both laws fit exactly (e.g. a constant curve); gapelmaper is then 1.
  bool degenerate = false;

  std::size_t n_tokens = 0;
  std::size_t n_vectors = 0;
  std::size_t tau_min = 0;
  std::size_t tau_max = 0;
  GridMode grid_mode = GridMode::Geometric20;
  double dropped_oov_fraction = 0.0;
  double dropped_nonpositive_fraction = 0.0;
  std::string embedding_name;
};

/// mape_power / mape_exp. Below 1 the curve is closer to a power law.
/// Fills only the metric fields of the report.
GapelmaperReport gapelmaper(const LawFit& power_fit, const LawFit& exp_fit);

/// Two-decimal rendering used wherever the ratio is displayed.
std::string format_gapelmaper(double value);

}  // namespace ltg
