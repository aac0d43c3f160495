#pragma once

// Slow reference solvers used to certify the fast path. Nothing here shares
// code with the taut-string, Dykstra or sort-based projection routines.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tvmax/fusion_graph.hpp"
#include "tvmax/grid.hpp"
#include "tvmax/tv_prox.hpp"
#include "tvmax/tvmax.hpp"

namespace tvmax {

struct OracleConfig {
  // Upper bound on solver sweeps.
  std::size_t max_iterations = 1'000'000;
  // Target duality gap. The primal error obeys ||w - w*||^2 <= 2 * gap.
  double tolerance = 1e-12;
  std::size_t small_instance_limit = 64;
  // KKT residual a prox solution must reach before it is handed out.
  double certify_kkt = 1e-6;
  // Adjacent values closer than this are treated as fused when certifying.
  double fuse_tol = 1e-6;

  // Reads TVMAX_ORACLE_ITERS, if set, into max_iterations.
  static OracleConfig from_env();
};

struct OptimalityReport {
  double kkt_residual = 0.0;
  double objective_value = 0.0;
  // Euclidean distance from w to the probability simplex.
  double feasibility_gap = 0.0;
  // Scaled dual variable t_e in [-1, 1] per edge, in graph edge order.
  std::vector<double> dual_certificate;
};

/// Reference prox of lambda * sum_{(i,j) in E} |w_i - w_j| at `x`.
///
/// Coordinate ascent on the box-constrained dual; stops when the duality gap
/// reaches cfg.tolerance. The answer is certified with subgradient_residual
/// before returning. Throws UnsupportedSize above cfg.small_instance_limit and
/// OracleUncertified when the gap or KKT target is missed.
ProxSolution oracle_prox(std::span<const double> x, const FusionGraph& graph, double lambda,
                         const OracleConfig& cfg = {});

/// Reference minimiser of 1/2 ||p - z||^2 + lambda * Omega_E(p) over the simplex.
///
/// Accelerated projected-gradient ascent on the dual; the primal iterate is the
/// simplex projection of z - D^T u. Same errors as oracle_prox.
std::vector<double> oracle_constrained(std::span<const double> z, const FusionGraph& graph,
                                       double lambda, const OracleConfig& cfg = {});

// Simplex projection by Michelot's iterative support pruning.
std::vector<double> oracle_simplex_projection(std::span<const double> z);

// 1/2 ||w - x||^2 + lambda * Omega_E(w).
double fused_objective(std::span<const double> x, std::span<const double> w,
                       const FusionGraph& graph, double lambda);

/// Stationarity violation of `w` for the prox problem at `x`.
///
/// Edges with |w_i - w_j| > fuse_tol get t = sgn(w_i - w_j); the remaining
/// (fused) edges get the box-constrained least-squares fit of their free
/// t in [-1, 1]. kkt_residual is the max over vertices of
/// |w_i - x_i + lambda * sum_e B_ie t_e|.
OptimalityReport subgradient_residual(std::span<const double> x, std::span<const double> w,
                                      const FusionGraph& graph, double lambda,
                                      double fuse_tol = 1e-9);

struct FiniteDifference {
  std::vector<double> derivative;
  // Support or partition differs between the base, plus and minus evaluations.
  bool structure_changed = false;
};

using GridMap = std::function<TvmaxResult(const ScoreGrid&)>;

// Central difference (fn(z + eps d) - fn(z - eps d)) / (2 eps) of the distribution.
FiniteDifference finite_difference_jvp(const GridMap& fn, const ScoreGrid& z,
                                       std::span<const double> direction, double epsilon);

}  // namespace tvmax
