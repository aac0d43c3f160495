#include "tvmax/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tvmax/error.hpp"
#include "tvmax/grid.hpp"

namespace tvmax {

std::vector<double> softmax(std::span<const double> z) {
  require_finite(z, "softmax input");
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> out(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - zmax);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> softmax_vjp(std::span<const double> p, std::span<const double> dp) {
  if (p.size() != dp.size()) throw InvalidInput("softmax_vjp: cotangent length mismatch");
  require_finite(dp, "softmax_vjp cotangent");
  double inner = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) inner += p[i] * dp[i];
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * (dp[i] - inner);
  return out;
}

double sparsemax_threshold(std::span<const double> z) {
  require_finite(z, "sparsemax input");
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  // Largest rho with sorted[rho-1] > (cumsum_rho - 1) / rho.
  double cumsum = 0.0;
  double tau = sorted[0] - 1.0;
  for (std::size_t rho = 1; rho <= sorted.size(); ++rho) {
    cumsum += sorted[rho - 1];
    const double candidate = (cumsum - 1.0) / static_cast<double>(rho);
    if (sorted[rho - 1] > candidate) {
      tau = candidate;
    } else {
      break;
    }
  }
  return tau;
}

std::vector<double> sparsemax(std::span<const double> z) {
  const double tau = sparsemax_threshold(z);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::max(z[i] - tau, 0.0);
  return out;
}

SupportIndicator sparsemax_support(std::span<const double> p) {
  SupportIndicator s;
  s.flags.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    s.flags[i] = p[i] > 0.0 ? 1 : 0;
    s.support_size += s.flags[i];
  }
  return s;
}

std::vector<double> sparsemax_vjp(std::span<const double> p, std::span<const double> dp) {
  if (p.size() != dp.size()) throw InvalidInput("sparsemax_vjp: cotangent length mismatch");
  require_finite(dp, "sparsemax_vjp cotangent");

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      sum += dp[i];
      ++count;
    }
  }
  if (count == 0) throw InvariantViolation("sparsemax_vjp: empty support");

  const double mean = sum / static_cast<double>(count);
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) out[i] = dp[i] - mean;
  }
  return out;
}

}  // namespace tvmax
