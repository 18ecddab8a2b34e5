#include "ltg/lawfit.hpp"

#include <fmt/format.h>

#include <cmath>

#include "ltg/error.hpp"

namespace ltg {

namespace {

constexpr std::size_t kMinFitPoints = 10;

LawFit fit_line(const AutocorrelationCurve& curve, const LagSelection& selection, Law law) {
  const auto& lags = selection.lags;
  const std::size_t k = lags.size();

  std::vector<double> xs(k);
  std::vector<double> ys(k);
  std::vector<double> cs(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = curve.value_at(lags[i]);
    if (!c) {
      throw Error(ErrorCode::InvalidArgument,
                  "lag " + std::to_string(lags[i]) + " is not on the curve");
    }
    if (!(*c > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "lag " + std::to_string(lags[i]) + " has non-positive C");
    }
    const double tau = static_cast<double>(lags[i]);
    xs[i] = law == Law::Power ? std::log(tau) : tau;
    ys[i] = std::log(*c);
    cs[i] = *c;
  }

  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(k);
  mean_y /= static_cast<double>(k);

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = xs[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (ys[i] - mean_y);
  }
  if (k == 0 || sxx == 0.0) {
    throw Error(ErrorCode::DegenerateFit, "all selected lags are equal; the regression is undefined");
  }
  if (k < kMinFitPoints) {
    throw Error(ErrorCode::InsufficientPositiveLags,
                "a fit needs at least 10 lags, got " + std::to_string(k));
  }

  LawFit fit;
  fit.law = law;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.n_points = k;

  double err = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double predicted = fit.predict(static_cast<double>(lags[i]));
    err += std::abs(cs[i] - predicted) / std::abs(cs[i]);
  }
  fit.mape = err / static_cast<double>(k);
  return fit;
}

}  // namespace

std::string_view to_string(GridMode mode) noexcept {
  return mode == GridMode::All ? "all" : "geometric20";
}

GridMode parse_grid_mode(std::string_view text) {
  if (text == "geometric20") return GridMode::Geometric20;
  if (text == "all") return GridMode::All;
  throw Error(ErrorCode::InvalidArgument,
              "unknown grid mode '" + std::string(text) + "' (expected geometric20 or all)");
}

std::string_view to_string(Law law) noexcept {
  return law == Law::Power ? "power" : "exponential";
}

LagSelection select_fit_lags(const AutocorrelationCurve& curve, std::size_t tau_min,
                             std::size_t tau_max, GridMode grid_mode) {
  if (tau_min < 1 || tau_min > tau_max) {
    throw Error(ErrorCode::InvalidArgument, "fit range requires 1 <= tau_min <= tau_max");
  }
  if (tau_max > curve.max_lag()) {
    throw Error(ErrorCode::InvalidArgument, "tau_max " + std::to_string(tau_max) +
                                                " exceeds the curve's largest lag " +
                                                std::to_string(curve.max_lag()));
  }

  std::vector<std::size_t> candidates;
  if (grid_mode == GridMode::All) {
    for (std::size_t tau = tau_min; tau <= tau_max; ++tau) candidates.push_back(tau);
  } else {
    for (int j = 0;; ++j) {
      const double raw = static_cast<double>(tau_min) * std::pow(10.0, j / 20.0);
      const auto tau = static_cast<std::size_t>(std::llround(raw));
      if (tau > tau_max) break;
      if (candidates.empty() || candidates.back() != tau) candidates.push_back(tau);
    }
  }

  LagSelection selection;
  selection.grid_mode = grid_mode;
  for (std::size_t tau : candidates) {
    const auto c = curve.value_at(tau);
    if (c && *c > 0.0) selection.lags.push_back(tau);
  }
  selection.dropped_nonpositive_fraction =
      candidates.empty()
          ? 0.0
          : static_cast<double>(candidates.size() - selection.lags.size()) /
                static_cast<double>(candidates.size());

  const auto& kept = selection.lags;
  if (kept.size() < kMinFitPoints || kept.back() < 10 * kept.front()) {
    throw Error(ErrorCode::InsufficientPositiveLags,
                fmt::format("only {} of {} lags in [{}, {}] have positive autocorrelation; "
                            "need at least {} spanning a decade",
                            kept.size(), candidates.size(), tau_min, tau_max, kMinFitPoints));
  }
  return selection;
}

double LawFit::predict(double tau) const noexcept {
  return law == Law::Power ? std::exp(intercept + slope * std::log(tau))
                           : std::exp(intercept + slope * tau);
}

LawFit fit_power_law(const AutocorrelationCurve& curve, const LagSelection& selection) {
  return fit_line(curve, selection, Law::Power);
}

LawFit fit_exponential_law(const AutocorrelationCurve& curve, const LagSelection& selection) {
  return fit_line(curve, selection, Law::Exponential);
}

GapelmaperReport gapelmaper(const LawFit& power_fit, const LawFit& exp_fit) {
  if (power_fit.law != Law::Power || exp_fit.law != Law::Exponential) {
    throw Error(ErrorCode::InvalidArgument, "gapelmaper expects a power fit and an exponential fit");
  }
  GapelmaperReport report;
  report.mape_power = power_fit.mape;
  report.mape_exp = exp_fit.mape;
  if (power_fit.mape <= kExactFitMape && exp_fit.mape <= kExactFitMape) {
    report.gapelmaper = 1.0;
    report.degenerate = true;
    return report;
  }
  if (exp_fit.mape == 0.0) {
    throw Error(ErrorCode::ZeroDenominator,
                "exponential fit is exact while the power fit is not; ratio is unbounded");
  }
  report.gapelmaper = power_fit.mape / exp_fit.mape;
  return report;
}

std::string format_gapelmaper(double value) { return fmt::format("{:.2f}", value); }

}  // namespace ltg
