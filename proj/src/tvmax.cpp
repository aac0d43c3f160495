#include "tvmax/tvmax.hpp"

#include "tvmax/error.hpp"
#include "tvmax/oracle.hpp"

namespace tvmax {

namespace {

TvmaxResult finish(ScoreGrid w_star, Adjacency adjacency, double lambda, double fuse_tol) {
  TvmaxResult r;
  r.distribution = ScoreGrid(w_star.rows(), w_star.cols(), sparsemax(w_star.values()));
  r.support = sparsemax_support(r.distribution.values());
  r.partition = lambda == 0.0 ? GroupPartition::singletons(w_star.size())
                              : extract_groups(w_star.values(), adjacency, fuse_tol);
  r.prox_w_star = std::move(w_star);
  r.adjacency = std::move(adjacency);
  r.lambda = lambda;
  r.fuse_tol = fuse_tol;
  return r;
}

}  // namespace

TvmaxResult tvmax_forward(const ScoreGrid& z, double lambda, const TvmaxOptions& opts) {
  ProxSolution prox = tv2d_prox(z, lambda, {opts.tol, opts.max_iter});
  TvmaxResult r = finish(std::move(prox.w_star), GridAdjacency{z.rows(), z.cols()}, lambda,
                         opts.fuse_tol);
  r.iterations = prox.iterations;
  r.residual = prox.residual;
  r.converged = prox.converged;
  return r;
}

TvmaxResult fusedmax1d_forward(std::span<const double> z, double lambda) {
  ProxSolution prox = tv1d_prox(z, lambda);
  return finish(std::move(prox.w_star), GridAdjacency{1, z.size()}, lambda, 0.0);
}

TvmaxResult gfusedmax_forward(std::span<const double> z, const FusionGraph& graph, double lambda,
                              double fuse_tol) {
  return gfusedmax_forward(z, graph, lambda, fuse_tol, OracleConfig{});
}

TvmaxResult gfusedmax_forward(std::span<const double> z, const FusionGraph& graph, double lambda,
                              double fuse_tol, const OracleConfig& cfg) {
  if (graph.num_vertices() != z.size()) {
    throw InvalidInput("gfusedmax_forward: graph size does not match the score length");
  }
  ProxSolution prox = oracle_prox(z, graph, lambda, cfg);
  TvmaxResult r = finish(std::move(prox.w_star), graph, lambda, fuse_tol);
  r.iterations = prox.iterations;
  r.residual = prox.residual;
  return r;
}

std::vector<double> tvmax_vjp(const TvmaxResult& result, std::span<const double> dp,
                              VjpStats* stats) {
  const std::size_t k = result.distribution.size();
  if (dp.size() != k) {
    throw InvalidInput("tvmax_vjp: cotangent has " + std::to_string(dp.size()) +
                       " entries, expected " + std::to_string(k));
  }
  const std::vector<double> dw = sparsemax_vjp(result.distribution.values(), dp);

  // Without fusion every cell is its own group; a negative tolerance keeps
  // the fill from ever crossing to a neighbour.
  const double tol = result.lambda == 0.0 ? -1.0 : result.fuse_tol;
  std::vector<double> dx(k);
  std::size_t groups = 0;
  const std::size_t visited =
      flood_fill(result.prox_w_star.values(), result.adjacency, tol,
                 [&](std::span<const std::size_t> members) {
                   double sum = 0.0;
                   for (std::size_t cell : members) sum += dw[cell];
                   const double mean = sum / static_cast<double>(members.size());
                   for (std::size_t cell : members) dx[cell] = mean;
                   ++groups;
                 });
  if (stats) *stats = {visited, groups};
  return dx;
}

}  // namespace tvmax
