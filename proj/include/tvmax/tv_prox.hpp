#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvmax/grid.hpp"

namespace tvmax {

// Output of a TV proximal solve plus solver diagnostics.
struct ProxSolution {
  ScoreGrid w_star;
  std::size_t iterations = 0;
  // Infinity-norm gap between the last two Dykstra half-steps; 0 for exact solves.
  double residual = 0.0;
  double lambda = 0.0;
  // False when the iteration budget ran out before `residual < tol`.
  bool converged = true;
};

struct DykstraOptions {
  double tol = 1e-7;
  std::size_t max_iter = 100;
};

/// Exact prox of lambda * sum_i |w_{i+1} - w_i| evaluated at `x`, written to `out`.
///
/// Direct linear-time taut-string style algorithm; segments of the solution
/// are written with a single value so fused entries compare exactly equal.
/// `out` may alias `x`.
void tv1d_prox_into(std::span<const double> x, double lambda, std::span<double> out);

// Throws InvalidParameter for negative lambda and InvalidInput for non-finite x.
ProxSolution tv1d_prox(std::span<const double> x, double lambda);

/// Prox of lambda * (row TV + column TV) on a grid by proximal Dykstra.
///
/// Alternates exact 1D solves over all rows, then all columns, with the two
/// Dykstra correction terms, until the row and column iterates agree to
/// `opts.tol` in the infinity norm or `opts.max_iter` sweeps have run. The
/// returned `w_star` is the column iterate. Running out of iterations is not
/// an error; it is reported through `converged`.
ProxSolution tv2d_prox(const ScoreGrid& x, double lambda, const DykstraOptions& opts = {});

// Unweighted TV penalties: sum of absolute differences along chains / rows and columns.
double tv2d_penalty(const ScoreGrid& w);
double tv1d_penalty(std::span<const double> w);

}  // namespace tvmax
