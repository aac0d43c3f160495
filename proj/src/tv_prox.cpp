#include "tvmax/tv_prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "tvmax/error.hpp"

namespace tvmax {

namespace {

void require_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("lambda must be a finite nonnegative number, got " +
                           std::to_string(lambda));
  }
}

// Writes the prox of the strided sequence x[0], x[stride], ... into the
// contiguous scratch buffer and back into `out` with the same stride.
void tv1d_strided(const double* x, double* out, std::size_t n, std::size_t stride,
                  double lambda, std::vector<double>& in_buf, std::vector<double>& out_buf) {
  in_buf.resize(n);
  out_buf.resize(n);
  for (std::size_t i = 0; i < n; ++i) in_buf[i] = x[i * stride];
  tv1d_prox_into(in_buf, lambda, out_buf);
  for (std::size_t i = 0; i < n; ++i) out[i * stride] = out_buf[i];
}

}  // namespace

void tv1d_prox_into(std::span<const double> x, double lambda, std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  if (n == 0) return;
  // Constant input is a fixed point; the level updates below would round it.
  if (lambda == 0.0 || std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) {
    std::copy(x.begin(), x.end(), out.begin());
    return;
  }
  // Every write lands below k0 and every read at or above it, so `out` may alias `x`.

  // Lower and upper candidate levels (vmin, vmax) for the segment starting at
  // k0, with their running dual offsets (umin, umax). kminus/kplus are the
  // last positions where the lower/upper taut-string bound was touched.
  std::ptrdiff_t k = 0, k0 = 0, kminus = 0, kplus = 0;
  double vmin = x[0] - lambda;
  double vmax = x[0] + lambda;
  double umin = lambda;
  double umax = -lambda;
  const double twolambda = 2.0 * lambda;

  for (;;) {
    while (k == n - 1) {
      if (umin < 0.0) {
        do out[k0++] = vmin; while (k0 <= kminus);
        k = kminus = k0;
        vmin = x[k0];
        umin = lambda;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do out[k0++] = vmax; while (k0 <= kplus);
        k = kplus = k0;
        vmax = x[k0];
        umax = -lambda;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do out[k0++] = vmin; while (k0 <= k);
        return;
      }
    }
    umin += x[k + 1] - vmin;
    if (umin < -lambda) {
      // Jump down: flush the segment at the lower level.
      do out[k0++] = vmin; while (k0 <= kminus);
      k = kminus = kplus = k0;
      vmin = x[k0];
      vmax = vmin + twolambda;
      umin = lambda;
      umax = -lambda;
      continue;
    }
    umax += x[k + 1] - vmax;
    if (umax > lambda) {
      // Jump up: flush the segment at the upper level.
      do out[k0++] = vmax; while (k0 <= kplus);
      k = kminus = kplus = k0;
      vmax = x[k0];
      vmin = vmax - twolambda;
      umin = lambda;
      umax = -lambda;
      continue;
    }
    ++k;
    if (umin >= lambda) {
      kminus = k;
      vmin += (umin - lambda) / static_cast<double>(kminus - k0 + 1);
      umin = lambda;
    }
    if (umax <= -lambda) {
      kplus = k;
      vmax += (umax + lambda) / static_cast<double>(kplus - k0 + 1);
      umax = -lambda;
    }
  }
}

ProxSolution tv1d_prox(std::span<const double> x, double lambda) {
  require_lambda(lambda);
  require_finite(x, "tv1d_prox input");
  std::vector<double> out(x.size());
  tv1d_prox_into(x, lambda, out);
  ProxSolution sol;
  sol.w_star = ScoreGrid::row(std::move(out));
  sol.lambda = lambda;
  return sol;
}

ProxSolution tv2d_prox(const ScoreGrid& x, double lambda, const DykstraOptions& opts) {
  require_lambda(lambda);
  if (!(opts.tol > 0.0)) throw InvalidParameter("tol must be positive");
  if (opts.max_iter < 1) throw InvalidParameter("max_iter must be at least 1");
  require_finite(x.values(), "tv2d_prox input");

  ProxSolution sol;
  sol.lambda = lambda;
  if (lambda == 0.0) {
    sol.w_star = x;
    return sol;
  }

  const std::size_t rows = x.rows();
  const std::size_t cols = x.cols();
  const std::size_t k = x.size();

  std::vector<double> u(x.values().begin(), x.values().end());
  std::vector<double> y(k), p(k, 0.0), q(k, 0.0), buf(k);
  std::vector<double> in_buf, out_buf;

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    // y = prox_rows(u + p); p = u + p - y
    for (std::size_t i = 0; i < k; ++i) buf[i] = u[i] + p[i];
    for (std::size_t r = 0; r < rows; ++r) {
      tv1d_prox_into(std::span<const double>(buf.data() + r * cols, cols), lambda,
                     std::span<double>(y.data() + r * cols, cols));
    }
    for (std::size_t i = 0; i < k; ++i) p[i] = buf[i] - y[i];

    // u = prox_cols(y + q); q = y + q - u
    for (std::size_t i = 0; i < k; ++i) buf[i] = y[i] + q[i];
    for (std::size_t c = 0; c < cols; ++c) {
      tv1d_strided(buf.data() + c, u.data() + c, rows, cols, lambda, in_buf, out_buf);
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      q[i] = buf[i] - u[i];
      gap = std::max(gap, std::abs(u[i] - y[i]));
    }

    sol.iterations = it;
    sol.residual = gap;
    if (gap < opts.tol) break;
  }
  sol.converged = sol.residual < opts.tol;
  sol.w_star = ScoreGrid(rows, cols, std::move(u));
  return sol;
}

double tv1d_penalty(std::span<const double> w) {
  double total = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) total += std::abs(w[i] - w[i - 1]);
  return total;
}

double tv2d_penalty(const ScoreGrid& w) {
  double total = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      if (c + 1 < w.cols()) total += std::abs(w(r, c + 1) - w(r, c));
      if (r + 1 < w.rows()) total += std::abs(w(r + 1, c) - w(r, c));
    }
  }
  return total;
}

}  // namespace tvmax
