#pragma once

#include <cstddef>

namespace ltg::detail {

// Throws TextTooShort / InvalidArgument for lags the sequence cannot support.
void check_autocorrelation_args(std::size_t n, std::size_t tau_max);

}  // namespace ltg::detail
