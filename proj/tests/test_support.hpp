#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "tvmax/grid.hpp"

namespace tvmax::testing {

inline std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline ScoreGrid normal_grid(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  return ScoreGrid(rows, cols, normal_vector(rng, rows * cols));
}

// Uniformly random point of the probability simplex.
inline std::vector<double> random_simplex_point(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  for (double& x : v) x = e(rng);
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
  return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l2_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double sum(std::span<const double> a) { return std::accumulate(a.begin(), a.end(), 0.0); }

inline bool on_simplex(std::span<const double> p, double tol = 1e-9) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v >= 0.0; }) &&
         std::abs(sum(p) - 1.0) <= tol;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace tvmax::testing
