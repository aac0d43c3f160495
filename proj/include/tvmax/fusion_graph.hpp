#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace tvmax {

struct Edge {
  std::size_t i;
  std::size_t j;
  bool operator==(const Edge&) const = default;
};

/// Undirected graph on vertices 0..k-1 whose edges carry the fused-lasso
/// penalty sum |w_i - w_j|. Edges are stored with i < j.
class FusionGraph {
 public:
  FusionGraph() = default;
  // Throws InvalidInput on self-loops, duplicates, out-of-range endpoints, or i > j.
  FusionGraph(std::size_t num_vertices, std::vector<Edge> edges);

  static FusionGraph empty(std::size_t k);
  static FusionGraph chain(std::size_t k);
  // 4-neighbour grid in row-major numbering: horizontal edges then vertical.
  static FusionGraph grid(std::size_t rows, std::size_t cols);
  // Vertex 0 joined to every other vertex.
  static FusionGraph star(std::size_t k);

  std::size_t num_vertices() const noexcept { return num_vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t max_degree() const noexcept;

  std::span<const std::size_t> neighbors(std::size_t v) const {
    return {adj_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

 private:
  std::size_t num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> adj_;
};

// Implicit 4-neighbour adjacency on a row-major grid.
struct GridAdjacency {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool operator==(const GridAdjacency&) const = default;
};

using Adjacency = std::variant<GridAdjacency, FusionGraph>;

std::size_t vertex_count(const Adjacency& adj);
FusionGraph as_graph(const Adjacency& adj);

template <class Fn>
void for_each_neighbor(const GridAdjacency& g, std::size_t v, Fn&& fn) {
  const std::size_t r = v / g.cols;
  const std::size_t c = v % g.cols;
  if (r > 0) fn(v - g.cols);
  if (c > 0) fn(v - 1);
  if (c + 1 < g.cols) fn(v + 1);
  if (r + 1 < g.rows) fn(v + g.cols);
}

template <class Fn>
void for_each_neighbor(const FusionGraph& g, std::size_t v, Fn&& fn) {
  for (std::size_t n : g.neighbors(v)) fn(n);
}

}  // namespace tvmax
