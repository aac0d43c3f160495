#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "tvmax/fusion_graph.hpp"

namespace tvmax {

// Connected components of equal-valued cells of a prox solution.
struct GroupPartition {
  std::vector<std::size_t> group_id;  // label per cell
  std::vector<std::size_t> group_sizes;
  std::vector<std::vector<std::size_t>> group_members;

  std::size_t num_groups() const noexcept { return group_sizes.size(); }
  std::size_t num_cells() const noexcept { return group_id.size(); }

  static GroupPartition singletons(std::size_t k);

  bool operator==(const GroupPartition&) const = default;
};

/// Stack-based flood fill over the cells of `w`.
///
/// Seeds are taken in index (row-major) order; a neighbour joins the current
/// group when it differs from the cell that reached it by at most `fuse_tol`.
/// Each cell is pushed and popped exactly once. `on_group` receives the member
/// list of every finished group in discovery order. Returns the number of pops.
template <class OnGroup>
std::size_t flood_fill(std::span<const double> w, const Adjacency& adj, double fuse_tol,
                       OnGroup&& on_group) {
  const std::size_t k = w.size();
  std::vector<unsigned char> queued(k, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> members;
  std::size_t pops = 0;

  auto run = [&](const auto& topo) {
    for (std::size_t seed = 0; seed < k; ++seed) {
      if (queued[seed]) continue;
      queued[seed] = 1;
      stack.push_back(seed);
      members.clear();
      while (!stack.empty()) {
        const std::size_t cell = stack.back();
        stack.pop_back();
        ++pops;
        members.push_back(cell);
        for_each_neighbor(topo, cell, [&](std::size_t nb) {
          if (!queued[nb] && std::abs(w[nb] - w[cell]) <= fuse_tol) {
            queued[nb] = 1;
            stack.push_back(nb);
          }
        });
      }
      on_group(std::span<const std::size_t>(members));
    }
  };
  std::visit(run, adj);
  return pops;
}

/// Labels the fused groups of `w_star` under `adj`.
///
/// Two adjacent cells are fused when their values differ by at most
/// `fuse_tol`; groups are the connected components of that relation, numbered
/// in order of their smallest cell index and with members listed in visit order.
GroupPartition extract_groups(std::span<const double> w_star, const Adjacency& adj,
                              double fuse_tol);

// Replaces every entry of dv by its mean over the entry's group.
std::vector<double> prox_jacobian_vjp(const GroupPartition& partition, std::span<const double> dv);

/// Largest deviation of a prox solution from the group-wise closed form.
///
/// For every group G the predicted common value is the mean over j in G of
/// x_j + lambda * sum over neighbours m outside G of sgn(w_m - w_j). The
/// return value is max |w_j - predicted(G)| over all cells.
double check_group_equation(std::span<const double> x, std::span<const double> w_star,
                            const GroupPartition& partition, const FusionGraph& graph,
                            double lambda);

}  // namespace tvmax
