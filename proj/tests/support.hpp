#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ltg/autocorrelation.hpp"
#include "ltg/embedding.hpp"

namespace ltg::testing {

inline UnitVectorSequence random_unit_sequence(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> raw(n * d);
  for (auto& v : raw) v = normal(rng);
  return UnitVectorSequence::from_raw(d, std::move(raw));
}

// Synthetic curve on lags 1..tau_max from a callable C(tau).
template <typename F>
AutocorrelationCurve synthetic_curve(std::size_t tau_max, F&& c) {
  AutocorrelationCurve curve;
  curve.n_source = 2 * tau_max + 1;
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    curve.lags.push_back(tau);
    curve.values.push_back(c(static_cast<double>(tau)));
  }
  return curve;
}

}  // namespace ltg::testing

#include <filesystem>
#include <fstream>
#include <string>

namespace ltg::testing {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ltg-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// GloVe-format table for words w0..w{words-1}.
inline std::string glove_text(std::size_t words, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    out += "w" + std::to_string(w);
    for (std::size_t k = 0; k < d; ++k) out += " " + std::to_string(normal(rng));
    out += "\n";
  }
  return out;
}

/// Sentences of random words w0..w{vocab-1}.
inline std::string word_text(std::size_t n_tokens, std::size_t vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string text;
  for (std::size_t i = 0; i < n_tokens; ++i) {
    std::string word = "w" + std::to_string(rng() % vocab);
    if (i % 12 == 0) word[0] = 'W';
    text += word;
    text += (i % 12 == 11) ? ".\n" : " ";
  }
  return text;
}

}  // namespace ltg::testing
