#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvmax/fusion_graph.hpp"
#include "tvmax/grid.hpp"
#include "tvmax/groups.hpp"
#include "tvmax/simplex.hpp"
#include "tvmax/tv_prox.hpp"

namespace tvmax {

struct OracleConfig;

inline constexpr double kDefaultLambda = 0.01;
inline constexpr double kDefaultFuseTol = 1e-6;

struct TvmaxOptions {
  double tol = 1e-7;
  std::size_t max_iter = 100;
  // Group detection threshold on the Dykstra output.
  double fuse_tol = kDefaultFuseTol;
};

/// Forward result of a fused sparse attention map. Everything the backward
/// pass needs is cached here; the value is immutable once built.
struct TvmaxResult {
  ScoreGrid distribution;  // sparsemax(prox_w_star), same shape as the input
  ScoreGrid prox_w_star;
  GroupPartition partition;
  SupportIndicator support;
  Adjacency adjacency;
  double lambda = 0.0;
  double fuse_tol = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// TVmax: sparsemax of the 2D total-variation prox of `z`.
///
/// With lambda == 0 the prox is skipped and the distribution is bit-identical
/// to sparsemax(z); the partition is then all singletons.
TvmaxResult tvmax_forward(const ScoreGrid& z, double lambda, const TvmaxOptions& opts = {});

// Chain (1D) variant with the exact prox; groups are detected by exact equality.
TvmaxResult fusedmax1d_forward(std::span<const double> z, double lambda);

/// Fused sparse attention over an arbitrary fusion graph.
///
/// No fast prox exists for a general edge set, so the prox comes from the
/// certified reference solver and is limited to small instances
/// (UnsupportedSize above the configured limit).
TvmaxResult gfusedmax_forward(std::span<const double> z, const FusionGraph& graph, double lambda,
                              double fuse_tol = kDefaultFuseTol);
TvmaxResult gfusedmax_forward(std::span<const double> z, const FusionGraph& graph, double lambda,
                              double fuse_tol, const OracleConfig& cfg);

struct VjpStats {
  std::size_t cells_visited = 0;
  std::size_t groups = 0;
};

/// Backward pass: J^T dp for the map that produced `result`.
///
/// dp goes through the sparsemax VJP, then a flood fill over the cached prox
/// solution replaces each entry by its fused-group mean. The fill visits
/// every cell exactly once; `stats`, when given, receives the counters.
std::vector<double> tvmax_vjp(const TvmaxResult& result, std::span<const double> dp,
                              VjpStats* stats = nullptr);

}  // namespace tvmax
