#include <algorithm>
#include <string>

#include "autocorrelation_detail.hpp"
#include "ltg/autocorrelation.hpp"
#include "ltg/error.hpp"

namespace ltg {

void detail::check_autocorrelation_args(std::size_t n, std::size_t tau_max) {
  if (tau_max == 0) throw Error(ErrorCode::InvalidArgument, "tau_max must be at least 1");
  if (n < 2 || tau_max >= n) {
    throw Error(ErrorCode::TextTooShort, "text too short: " + std::to_string(n) +
                                             " vectors cannot support lag " +
                                             std::to_string(tau_max));
  }
}

std::optional<double> AutocorrelationCurve::value_at(std::size_t lag) const {
  auto it = std::lower_bound(lags.begin(), lags.end(), lag);
  if (it == lags.end() || *it != lag) return std::nullopt;
  return values[static_cast<std::size_t>(it - lags.begin())];
}

AutocorrelationCurve autocorrelation_naive(const UnitVectorSequence& seq, std::size_t tau_max) {
  const std::size_t n = seq.size();
  const std::size_t d = seq.dimension();
  detail::check_autocorrelation_args(n, tau_max);

  const double* x = seq.data().data();
  AutocorrelationCurve curve;
  curve.n_source = n;
  curve.lags.reserve(tau_max);
  curve.values.reserve(tau_max);
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    double sum = 0.0;
    for (std::size_t i = 0; i + tau < n; ++i) {
      const double* a = x + i * d;
      const double* b = x + (i + tau) * d;
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += a[k] * b[k];
      sum += dot;
    }
    curve.lags.push_back(tau);
    curve.values.push_back(sum / static_cast<double>(n - tau));
  }
  return curve;
}

}  // namespace ltg
