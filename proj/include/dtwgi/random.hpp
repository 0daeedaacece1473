#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "dtwgi/time_series.hpp"

namespace dtwgi {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = 0x243F6A8885A308D3ULL;
  for (auto p : parts) s = mix_seed(s, p);
  return s;
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng,
                              double stddev = 1.0) {
  std::normal_distribution<double> n(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

} // namespace dtwgi
