#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ltg/embedding.hpp"

namespace ltg {

/// Mean cosine similarity C(tau) between vectors `tau` positions apart,
/// sampled at strictly increasing positive lags.
struct AutocorrelationCurve {
  std::vector<std::size_t> lags;
  std::vector<double> values;
  std::size_t n_source = 0;

  std::size_t size() const noexcept { return lags.size(); }
  std::size_t max_lag() const noexcept { return lags.empty() ? 0 : lags.back(); }
  std::optional<double> value_at(std::size_t lag) const;
};

/// Direct O(N * tau_max * d) evaluation. Serial; kept as the reference the
/// transform path is tested against.
/// Throws Error(TextTooShort) if N < 2 or tau_max >= N.
AutocorrelationCurve autocorrelation_naive(const UnitVectorSequence& seq, std::size_t tau_max);

/// Same contract as autocorrelation_naive in O(d * N log N): one real FFT
/// autocorrelation per dimension, zero-padded to at least 2N, run in parallel
/// over dimensions and reduced pairwise in dimension order. `threads` <= 0
/// uses the OpenMP default. Output does not depend on the thread count.
AutocorrelationCurve autocorrelation_fft(const UnitVectorSequence& seq, std::size_t tau_max,
                                         int threads = 0);

/// Smallest integer >= n whose only prime factors are 2, 3 and 5.
std::size_t smooth_fft_size(std::size_t n);

}  // namespace ltg
