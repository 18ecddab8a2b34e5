#include <doctest.h>

#include <algorithm>
#include <chrono>

#include "ltg/autocorrelation.hpp"
#include "ltg/error.hpp"
#include "support.hpp"

using namespace ltg;
using ltg::testing::random_unit_sequence;

namespace {

UnitVectorSequence scalar_sequence(std::vector<double> values) {
  return UnitVectorSequence(1, std::move(values));
}

bool within_tolerance(double got, double want) {
  return std::abs(got - want) <= std::max(1e-8, 1e-6 * std::abs(want));
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::BadRequest;
}

}  // namespace

TEST_CASE("constant and alternating sequences") {
  const auto constant = scalar_sequence({1, 1, 1, 1});
  for (auto* f : {&autocorrelation_naive}) {
    const auto c = f(constant, 2);
    CHECK(c.lags == std::vector<std::size_t>{1, 2});
    CHECK(c.values[0] == 1.0);
    CHECK(c.values[1] == 1.0);
  }
  const auto c = autocorrelation_fft(constant, 2);
  CHECK(std::abs(c.values[0] - 1.0) < 1e-12);
  CHECK(std::abs(c.values[1] - 1.0) < 1e-12);

  const auto alternating = scalar_sequence({1, -1, 1, -1});
  CHECK(autocorrelation_naive(alternating, 1).values[0] == -1.0);
  CHECK(std::abs(autocorrelation_fft(alternating, 1).values[0] + 1.0) < 1e-12);
}

TEST_CASE("orthogonal neighbours give zero") {
  const UnitVectorSequence seq(2, {1, 0, 0, 1, 1, 0});
  CHECK(autocorrelation_naive(seq, 1).values[0] == 0.0);
  CHECK(std::abs(autocorrelation_fft(seq, 1).values[0]) < 1e-12);
  CHECK(autocorrelation_naive(seq, 2).values[1] == 1.0);
}

TEST_CASE("period-2 sign alternation gives (-1)^tau at every lag") {
  std::vector<double> v(257);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2 ? -1.0 : 1.0;
  const auto seq = scalar_sequence(v);
  const auto c = autocorrelation_fft(seq, 256);
  for (std::size_t t = 0; t < c.size(); ++t) {
    CHECK(std::abs(c.values[t] - (c.lags[t] % 2 ? -1.0 : 1.0)) < 1e-12);
  }
}

TEST_CASE("too-short input is rejected by both paths") {
  const auto one = scalar_sequence({1});
  const auto four = scalar_sequence({1, 1, 1, 1});
  CHECK(error_of([&] { autocorrelation_naive(one, 1); }) == ErrorCode::TextTooShort);
  CHECK(error_of([&] { autocorrelation_fft(one, 1); }) == ErrorCode::TextTooShort);
  CHECK(error_of([&] { autocorrelation_naive(four, 4); }) == ErrorCode::TextTooShort);
  CHECK(error_of([&] { autocorrelation_fft(four, 4); }) == ErrorCode::TextTooShort);
  CHECK(error_of([&] { autocorrelation_fft(four, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("fft path matches the naive oracle, N=1024 d=8 tau_max=512") {
  const auto seq = random_unit_sequence(1024, 8, 42);
  const auto slow = autocorrelation_naive(seq, 512);
  const auto fast = autocorrelation_fft(seq, 512);
  REQUIRE(fast.lags == slow.lags);
  for (std::size_t t = 0; t < slow.size(); ++t) {
    CHECK_MESSAGE(within_tolerance(fast.values[t], slow.values[t]), "lag " << slow.lags[t]);
  }
}

TEST_CASE("randomized equivalence and invariants") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 2 + rng() % 1500;
    const std::size_t d = 1 + rng() % 16;
    const std::size_t tau_max = 1 + rng() % (n - 1);
    const auto seq = random_unit_sequence(n, d, rng());
    const auto slow = autocorrelation_naive(seq, tau_max);
    const auto fast = autocorrelation_fft(seq, tau_max);
    REQUIRE(fast.size() == tau_max);
    CHECK(fast.n_source == n);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < tau_max; ++t) {
      if (!within_tolerance(fast.values[t], slow.values[t])) ++bad;
      CHECK(fast.values[t] >= -1.0 - 1e-9);
      CHECK(fast.values[t] <= 1.0 + 1e-9);
    }
    CHECK_MESSAGE(bad == 0, "n=" << n << " d=" << d << " tau_max=" << tau_max);
  }
}

TEST_CASE("reversal leaves the curve unchanged") {
  const auto seq = random_unit_sequence(300, 5, 9);
  std::vector<double> reversed;
  for (std::size_t i = seq.size(); i-- > 0;) {
    reversed.insert(reversed.end(), seq[i].begin(), seq[i].end());
  }
  const UnitVectorSequence rev(5, reversed);
  const auto a = autocorrelation_fft(seq, 150);
  const auto b = autocorrelation_fft(rev, 150);
  const auto c = autocorrelation_naive(rev, 150);
  const auto e = autocorrelation_naive(seq, 150);
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(std::abs(a.values[t] - b.values[t]) < 1e-12);
    CHECK(std::abs(c.values[t] - e.values[t]) < 1e-12);
  }
}

TEST_CASE("fft output is bit-identical across runs and thread counts") {
  const auto seq = random_unit_sequence(2000, 13, 5);
  const auto a = autocorrelation_fft(seq, 900, 1);
  const auto b = autocorrelation_fft(seq, 900, 4);
  const auto c = autocorrelation_fft(seq, 900);
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
}

TEST_CASE("smooth_fft_size") {
  CHECK(smooth_fft_size(1) == 1);
  CHECK(smooth_fft_size(7) == 8);
  CHECK(smooth_fft_size(14) == 15);
  CHECK(smooth_fft_size(1200000) == 1200000);
  CHECK(smooth_fft_size(1200001) == 1215000);
}

TEST_CASE("value_at looks up by lag") {
  AutocorrelationCurve c{{1, 2, 5}, {0.5, 0.25, 0.1}, 10};
  CHECK(c.value_at(5) == 0.1);
  CHECK(!c.value_at(3));
  CHECK(c.max_lag() == 5);
}
