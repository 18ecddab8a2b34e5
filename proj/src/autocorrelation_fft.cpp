#include <fftw3.h>
#include <omp.h>

#include <complex>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>

#include "autocorrelation_detail.hpp"
#include "ltg/autocorrelation.hpp"
#include "ltg/error.hpp"

namespace ltg {

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex g_plan_mutex;

template <typename T>
struct FftwFree {
  void operator()(T* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree<T>>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plans {
 public:
  explicit Plans(std::size_t length) {
    auto real = fftw_alloc<double>(length);
    auto spectrum = fftw_alloc<fftw_complex>(length / 2 + 1);
    const int n = static_cast<int>(length);
    std::lock_guard lock(g_plan_mutex);
    forward_ = fftw_plan_dft_r2c_1d(n, real.get(), spectrum.get(), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(n, spectrum.get(), real.get(), FFTW_ESTIMATE);
    if (!forward_ || !inverse_) throw std::runtime_error("FFTW planning failed");
  }
  ~Plans() {
    std::lock_guard lock(g_plan_mutex);
    if (forward_) fftw_destroy_plan(forward_);
    if (inverse_) fftw_destroy_plan(inverse_);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;

  fftw_plan forward() const noexcept { return forward_; }
  fftw_plan inverse() const noexcept { return inverse_; }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace

std::size_t smooth_fft_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

AutocorrelationCurve autocorrelation_fft(const UnitVectorSequence& seq, std::size_t tau_max,
                                         int threads) {
  const std::size_t n = seq.size();
  const std::size_t d = seq.dimension();
  detail::check_autocorrelation_args(n, tau_max);

  const std::size_t length = smooth_fft_size(2 * n);
  const std::size_t bins = length / 2 + 1;
  const Plans plans(length);
  const double* x = seq.data().data();
  const double scale = 1.0 / static_cast<double>(length);

  // partial[k * tau_max + (tau - 1)] = sum_i x[i][k] * x[i + tau][k]
  std::vector<double> partial(d * tau_max);
  const int team = threads > 0 ? threads : omp_get_max_threads();

  std::vector<FftwBuffer<double>> reals;
  std::vector<FftwBuffer<fftw_complex>> spectra;
  for (int t = 0; t < team; ++t) {
    reals.push_back(fftw_alloc<double>(length));
    spectra.push_back(fftw_alloc<fftw_complex>(bins));
  }

#pragma omp parallel num_threads(team)
  {
    double* real = reals[static_cast<std::size_t>(omp_get_thread_num())].get();
    fftw_complex* spectrum = spectra[static_cast<std::size_t>(omp_get_thread_num())].get();

#pragma omp for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(d); ++kk) {
      const auto k = static_cast<std::size_t>(kk);
      for (std::size_t i = 0; i < n; ++i) real[i] = x[i * d + k];
      std::fill(real + n, real + length, 0.0);

      fftw_execute_dft_r2c(plans.forward(), real, spectrum);
      for (std::size_t j = 0; j < bins; ++j) {
        const double re = spectrum[j][0];
        const double im = spectrum[j][1];
        spectrum[j][0] = re * re + im * im;
        spectrum[j][1] = 0.0;
      }
      fftw_execute_dft_c2r(plans.inverse(), spectrum, real);

      double* out = partial.data() + k * tau_max;
      for (std::size_t tau = 1; tau <= tau_max; ++tau) out[tau - 1] = real[tau] * scale;
    }
  }

  // Pairwise reduction over dimensions in a fixed tree.
  for (std::size_t stride = 1; stride < d; stride *= 2) {
    for (std::size_t k = 0; k + stride < d; k += 2 * stride) {
      double* dst = partial.data() + k * tau_max;
      const double* src = partial.data() + (k + stride) * tau_max;
      for (std::size_t t = 0; t < tau_max; ++t) dst[t] += src[t];
    }
  }

  AutocorrelationCurve curve;
  curve.n_source = n;
  curve.lags.resize(tau_max);
  curve.values.resize(tau_max);
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    curve.lags[tau - 1] = tau;
    curve.values[tau - 1] = partial[tau - 1] / static_cast<double>(n - tau);
  }
  return curve;
}

}  // namespace ltg
