#include "tvmax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "tvmax/error.hpp"

namespace tvmax {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

void require_small(std::size_t k, const OracleConfig& cfg) {
  if (k > cfg.small_instance_limit) {
    throw UnsupportedSize("reference solver limited to " +
                          std::to_string(cfg.small_instance_limit) + " entries, got " +
                          std::to_string(k));
  }
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("lambda must be a finite nonnegative number");
  }
}

// x - D^T u, where D maps w to the per-edge differences w_i - w_j.
std::vector<double> primal_from_dual(std::span<const double> x, const FusionGraph& graph,
                                     std::span<const double> u) {
  std::vector<double> w(x.begin(), x.end());
  const auto& edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    w[edges[e].i] -= u[e];
    w[edges[e].j] += u[e];
  }
  return w;
}

// P(w) - L(w, u) = sum_e lambda |d_e| - u_e d_e with d = D w. Nonnegative for u in the box.
double duality_gap(std::span<const double> w, const FusionGraph& graph,
                   std::span<const double> u, double lambda) {
  double gap = 0.0;
  const auto& edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double d = w[edges[e].i] - w[edges[e].j];
    gap += lambda * std::abs(d) - u[e] * d;
  }
  return gap;
}

}  // namespace

OracleConfig OracleConfig::from_env() {
  OracleConfig cfg;
  if (const char* env = std::getenv("TVMAX_ORACLE_ITERS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cfg.max_iterations = v;
  }
  return cfg;
}

std::vector<double> oracle_simplex_projection(std::span<const double> z) {
  require_finite(z, "projection input");
  // Michelot: drop every coordinate at or below the running threshold until
  // the active set stops shrinking.
  std::vector<std::size_t> active(z.size());
  std::iota(active.begin(), active.end(), std::size_t{0});
  double tau = 0.0;
  for (;;) {
    double sum = 0.0;
    for (std::size_t i : active) sum += z[i];
    tau = (sum - 1.0) / static_cast<double>(active.size());
    const auto kept = std::partition(active.begin(), active.end(),
                                     [&](std::size_t i) { return z[i] > tau; });
    if (kept == active.end()) break;
    active.erase(kept, active.end());
  }
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::max(z[i] - tau, 0.0);
  return p;
}

double fused_objective(std::span<const double> x, std::span<const double> w,
                       const FusionGraph& graph, double lambda) {
  double fit = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) fit += 0.5 * (w[i] - x[i]) * (w[i] - x[i]);
  double tv = 0.0;
  for (const Edge& e : graph.edges()) tv += std::abs(w[e.i] - w[e.j]);
  return fit + lambda * tv;
}

ProxSolution oracle_prox(std::span<const double> x, const FusionGraph& graph, double lambda,
                         const OracleConfig& cfg) {
  require_small(x.size(), cfg);
  require_lambda(lambda);
  require_finite(x, "oracle_prox input");
  if (graph.num_vertices() != x.size()) throw InvalidInput("oracle_prox: graph size mismatch");

  ProxSolution sol;
  sol.lambda = lambda;
  const auto& edges = graph.edges();
  if (lambda == 0.0 || edges.empty()) {
    sol.w_star = ScoreGrid::row({x.begin(), x.end()});
    return sol;
  }

  std::vector<double> u(edges.size(), 0.0);
  std::vector<double> w(x.begin(), x.end());
  double gap = duality_gap(w, graph, u, lambda);
  std::size_t sweep = 0;
  while (gap > cfg.tolerance && sweep < cfg.max_iterations) {
    ++sweep;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::size_t i = edges[e].i;
      const std::size_t j = edges[e].j;
      const double next = std::clamp(u[e] + 0.5 * (w[i] - w[j]), -lambda, lambda);
      const double delta = next - u[e];
      u[e] = next;
      w[i] -= delta;
      w[j] += delta;
    }
    w = primal_from_dual(x, graph, u);
    gap = duality_gap(w, graph, u, lambda);
  }
  if (gap > cfg.tolerance) {
    throw OracleUncertified("oracle_prox: duality gap " + std::to_string(gap) + " after " +
                            std::to_string(sweep) + " sweeps");
  }
  const OptimalityReport report = subgradient_residual(x, w, graph, lambda, cfg.fuse_tol);
  if (report.kkt_residual > cfg.certify_kkt) {
    throw OracleUncertified("oracle_prox: KKT residual " + std::to_string(report.kkt_residual));
  }
  sol.w_star = ScoreGrid::row(std::move(w));
  sol.iterations = sweep;
  sol.residual = gap;
  return sol;
}

std::vector<double> oracle_constrained(std::span<const double> z, const FusionGraph& graph,
                                       double lambda, const OracleConfig& cfg) {
  require_small(z.size(), cfg);
  require_lambda(lambda);
  require_finite(z, "oracle_constrained input");
  if (graph.num_vertices() != z.size()) {
    throw InvalidInput("oracle_constrained: graph size mismatch");
  }
  const auto& edges = graph.edges();
  if (lambda == 0.0 || edges.empty()) return oracle_simplex_projection(z);

  // Dual ascent on g(u) = min_{p in simplex} 1/2 ||p - z||^2 + u^T D p over
  // the box |u_e| <= lambda; grad g(u) = D p(u) with p(u) = proj(z - D^T u).
  // ||D||^2 <= 2 * max degree bounds the gradient's Lipschitz constant.
  const double step = 1.0 / (2.0 * static_cast<double>(graph.max_degree()));
  const std::size_t m = edges.size();
  std::vector<double> u(m, 0.0), u_prev(m, 0.0), v(m, 0.0), next(m);
  double t = 1.0;

  auto primal = [&](std::span<const double> dual) {
    return oracle_simplex_projection(primal_from_dual(z, graph, dual));
  };

  std::vector<double> best = primal(u);
  double best_gap = duality_gap(best, graph, u, lambda);
  std::size_t it = 0;
  while (best_gap > cfg.tolerance && it < cfg.max_iterations) {
    ++it;
    const std::vector<double> pv = primal(v);
    for (std::size_t e = 0; e < m; ++e) {
      next[e] = std::clamp(v[e] + step * (pv[edges[e].i] - pv[edges[e].j]), -lambda, lambda);
    }
    // Adaptive restart when the momentum step points against the ascent step.
    double dot = 0.0;
    for (std::size_t e = 0; e < m; ++e) dot += (v[e] - next[e]) * (next[e] - u[e]);

    const std::vector<double> p = primal(next);
    const double gap = duality_gap(p, graph, next, lambda);
    if (gap < best_gap) {
      best_gap = gap;
      best = p;
    }

    u_prev = u;
    u = next;
    if (dot > 0.0) {
      t = 1.0;
      v = u;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      for (std::size_t e = 0; e < m; ++e) v[e] = u[e] + beta * (u[e] - u_prev[e]);
      t = t_next;
    }
  }
  if (best_gap > cfg.tolerance) {
    throw OracleUncertified("oracle_constrained: duality gap " + std::to_string(best_gap) +
                            " after " + std::to_string(it) + " iterations");
  }
  return best;
}

OptimalityReport subgradient_residual(std::span<const double> x, std::span<const double> w,
                                      const FusionGraph& graph, double lambda, double fuse_tol) {
  const std::size_t k = x.size();
  if (w.size() != k || graph.num_vertices() != k) {
    throw InvalidInput("subgradient_residual: size mismatch");
  }
  require_finite(w, "subgradient_residual point");
  const auto& edges = graph.edges();

  OptimalityReport report;
  report.objective_value = fused_objective(x, w, graph, lambda);
  {
    const auto proj = oracle_simplex_projection(w);
    double dist = 0.0;
    for (std::size_t i = 0; i < k; ++i) dist += (w[i] - proj[i]) * (w[i] - proj[i]);
    report.feasibility_gap = std::sqrt(dist);
  }
  report.dual_certificate.assign(edges.size(), 0.0);

  // rho = x - w - lambda * B t, where B has +1 at the first and -1 at the
  // second endpoint of each edge. Stationarity asks for rho == 0.
  std::vector<double> rho(k);
  for (std::size_t i = 0; i < k; ++i) rho[i] = x[i] - w[i];
  if (lambda == 0.0) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      report.dual_certificate[e] = sign(w[edges[e].i] - w[edges[e].j]);
    }
    for (double r : rho) report.kkt_residual = std::max(report.kkt_residual, std::abs(r));
    return report;
  }

  std::vector<std::size_t> fused;
  auto& t = report.dual_certificate;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& ed = edges[e];
    const double d = w[ed.i] - w[ed.j];
    if (std::abs(d) > fuse_tol) {
      t[e] = sign(d);
      rho[ed.i] -= lambda * t[e];
      rho[ed.j] += lambda * t[e];
    } else {
      fused.push_back(e);
    }
  }

  // Warm start: peel a spanning forest of the fused subgraph from the leaves,
  // giving each tree edge the flow its child still needs.
  {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(k);  // (neighbour, edge)
    for (std::size_t e : fused) {
      adj[edges[e].i].push_back({edges[e].j, e});
      adj[edges[e].j].push_back({edges[e].i, e});
    }
    std::vector<unsigned char> seen(k, 0);
    std::vector<std::size_t> order, parent_edge(k, edges.size()), parent(k, k);
    for (std::size_t root = 0; root < k; ++root) {
      if (seen[root]) continue;
      seen[root] = 1;
      std::size_t head = order.size();
      order.push_back(root);
      while (head < order.size()) {
        const std::size_t v = order[head++];
        for (auto [nb, e] : adj[v]) {
          if (seen[nb]) continue;
          seen[nb] = 1;
          parent[nb] = v;
          parent_edge[nb] = e;
          order.push_back(nb);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t v = *it;
      const std::size_t e = parent_edge[v];
      if (e == edges.size()) continue;
      // rho_v loses lambda * B_ve * t_e.
      const double b_v = edges[e].i == v ? 1.0 : -1.0;
      const double te = std::clamp(rho[v] / (lambda * b_v), -1.0, 1.0);
      t[e] = te;
      rho[v] -= lambda * b_v * te;
      rho[parent[v]] += lambda * b_v * te;
    }
  }

  // Coordinate descent on 1/2 ||rho||^2 over the free t's, for cycles and
  // clipped tree edges.
  auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
  };
  double best = max_abs(rho);
  std::vector<double> best_t = t;
  if (!fused.empty() && best > 0.0) {
    const std::size_t max_sweeps = std::max<std::size_t>(1, 20'000'000 / fused.size());
    for (std::size_t sweep = 0; sweep < std::min<std::size_t>(max_sweeps, 100'000); ++sweep) {
      double moved = 0.0;
      for (std::size_t e : fused) {
        const std::size_t i = edges[e].i;
        const std::size_t j = edges[e].j;
        const double next = std::clamp(t[e] + (rho[i] - rho[j]) / (2.0 * lambda), -1.0, 1.0);
        const double delta = next - t[e];
        if (delta == 0.0) continue;
        t[e] = next;
        rho[i] -= lambda * delta;
        rho[j] += lambda * delta;
        moved = std::max(moved, std::abs(lambda * delta));
      }
      const double now = max_abs(rho);
      if (now < best) {
        best = now;
        best_t = t;
      }
      if (moved < 1e-16) break;
    }
  }
  t = std::move(best_t);
  for (double te : t) {
    if (te < -1.0 || te > 1.0) throw InvariantViolation("dual certificate left the box");
  }
  report.kkt_residual = best;
  return report;
}

FiniteDifference finite_difference_jvp(const GridMap& fn, const ScoreGrid& z,
                                       std::span<const double> direction, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
  if (direction.size() != z.size()) throw InvalidInput("direction length mismatch");

  std::vector<double> plus(z.values().begin(), z.values().end());
  std::vector<double> minus = plus;
  for (std::size_t i = 0; i < plus.size(); ++i) {
    plus[i] += epsilon * direction[i];
    minus[i] -= epsilon * direction[i];
  }
  const TvmaxResult base = fn(z);
  const TvmaxResult hi = fn(ScoreGrid(z.rows(), z.cols(), std::move(plus)));
  const TvmaxResult lo = fn(ScoreGrid(z.rows(), z.cols(), std::move(minus)));

  FiniteDifference fd;
  fd.derivative.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    fd.derivative[i] =
        (hi.distribution.values()[i] - lo.distribution.values()[i]) / (2.0 * epsilon);
  }
  fd.structure_changed = hi.support != base.support || lo.support != base.support ||
                         hi.partition.group_id != base.partition.group_id ||
                         lo.partition.group_id != base.partition.group_id;
  return fd;
}

}  // namespace tvmax
