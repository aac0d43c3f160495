#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tvmax {

// Mask of the strictly positive entries of a sparse distribution.
struct SupportIndicator {
  std::vector<unsigned char> flags;
  std::size_t support_size = 0;

  bool operator==(const SupportIndicator&) const = default;
};

// Max-subtracted softmax; output is strictly positive.
std::vector<double> softmax(std::span<const double> z);

// J^T dp for softmax at output p: p * (dp - <p, dp>).
std::vector<double> softmax_vjp(std::span<const double> p, std::span<const double> dp);

/// Euclidean projection of `z` onto the probability simplex.
///
/// Sort-based threshold search, O(k log k). Entries below the threshold come
/// out as exact zeros, so the support can be read off with `> 0`.
std::vector<double> sparsemax(std::span<const double> z);

// The threshold tau such that sparsemax(z) = max(z - tau, 0).
double sparsemax_threshold(std::span<const double> z);

SupportIndicator sparsemax_support(std::span<const double> p);

/// Product of the sparsemax Jacobian at output `p` with `dp`.
///
/// The Jacobian diag(s) - s s^T / |s| is symmetric, so this is both the VJP
/// and the JVP: on-support entries receive dp minus its support mean and the
/// rest receive zero. Throws InvariantViolation on an empty support.
std::vector<double> sparsemax_vjp(std::span<const double> p, std::span<const double> dp);

}  // namespace tvmax
