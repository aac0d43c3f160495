#include "tvmax/groups.hpp"

#include <algorithm>

#include "tvmax/error.hpp"

namespace tvmax {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

GroupPartition GroupPartition::singletons(std::size_t k) {
  GroupPartition part;
  part.group_id.resize(k);
  part.group_sizes.assign(k, 1);
  part.group_members.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    part.group_id[i] = i;
    part.group_members[i] = {i};
  }
  return part;
}

GroupPartition extract_groups(std::span<const double> w_star, const Adjacency& adj,
                              double fuse_tol) {
  if (vertex_count(adj) != w_star.size()) {
    throw InvalidInput("extract_groups: adjacency size does not match the solution length");
  }
  GroupPartition part;
  part.group_id.resize(w_star.size());
  flood_fill(w_star, adj, fuse_tol, [&](std::span<const std::size_t> members) {
    const std::size_t label = part.group_sizes.size();
    for (std::size_t cell : members) part.group_id[cell] = label;
    part.group_sizes.push_back(members.size());
    part.group_members.emplace_back(members.begin(), members.end());
  });
  return part;
}

std::vector<double> prox_jacobian_vjp(const GroupPartition& partition,
                                      std::span<const double> dv) {
  if (dv.size() != partition.num_cells()) {
    throw InvalidInput("prox_jacobian_vjp: cotangent length does not match the partition");
  }
  std::vector<double> out(dv.size());
  for (const auto& members : partition.group_members) {
    double sum = 0.0;
    for (std::size_t cell : members) sum += dv[cell];
    const double mean = sum / static_cast<double>(members.size());
    for (std::size_t cell : members) out[cell] = mean;
  }
  return out;
}

double check_group_equation(std::span<const double> x, std::span<const double> w_star,
                            const GroupPartition& partition, const FusionGraph& graph,
                            double lambda) {
  const std::size_t k = x.size();
  if (w_star.size() != k || partition.num_cells() != k || graph.num_vertices() != k) {
    throw InvalidInput("check_group_equation: size mismatch");
  }
  double worst = 0.0;
  for (std::size_t g = 0; g < partition.num_groups(); ++g) {
    const auto& members = partition.group_members[g];
    double total = 0.0;
    for (std::size_t j : members) {
      total += x[j];
      for (std::size_t m : graph.neighbors(j)) {
        if (partition.group_id[m] != g) total += lambda * sign(w_star[m] - w_star[j]);
      }
    }
    const double predicted = total / static_cast<double>(members.size());
    for (std::size_t j : members) worst = std::max(worst, std::abs(w_star[j] - predicted));
  }
  return worst;
}

}  // namespace tvmax
