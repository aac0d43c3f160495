#include "tvmax/fusion_graph.hpp"

#include <algorithm>
#include <string>
#include <type_traits>

#include "tvmax/error.hpp"

namespace tvmax {

FusionGraph::FusionGraph(std::size_t num_vertices, std::vector<Edge> edges)
    : num_vertices_(num_vertices), edges_(std::move(edges)) {
  std::vector<std::size_t> degree(num_vertices_ + 1, 0);
  for (const Edge& e : edges_) {
    if (e.i >= e.j) {
      throw InvalidInput("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                         ") must satisfy i < j");
    }
    if (e.j >= num_vertices_) {
      throw InvalidInput("edge endpoint " + std::to_string(e.j) + " out of range");
    }
    ++degree[e.i];
    ++degree[e.j];
  }
  std::vector<Edge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidInput("duplicate edge in fusion graph");
  }

  offsets_.assign(num_vertices_ + 1, 0);
  for (std::size_t v = 0; v < num_vertices_; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adj_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adj_[fill[e.i]++] = e.j;
    adj_[fill[e.j]++] = e.i;
  }
}

FusionGraph FusionGraph::empty(std::size_t k) { return FusionGraph(k, {}); }

FusionGraph FusionGraph::chain(std::size_t k) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < k; ++i) edges.push_back({i, i + 1});
  return FusionGraph(k, std::move(edges));
}

FusionGraph FusionGraph::grid(std::size_t rows, std::size_t cols) {
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c + 1 < cols; ++c) edges.push_back({r * cols + c, r * cols + c + 1});
  }
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) edges.push_back({r * cols + c, (r + 1) * cols + c});
  }
  return FusionGraph(rows * cols, std::move(edges));
}

FusionGraph FusionGraph::star(std::size_t k) {
  std::vector<Edge> edges;
  for (std::size_t j = 1; j < k; ++j) edges.push_back({0, j});
  return FusionGraph(k, std::move(edges));
}

std::size_t FusionGraph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t v = 0; v < num_vertices_; ++v) best = std::max(best, offsets_[v + 1] - offsets_[v]);
  return best;
}

std::size_t vertex_count(const Adjacency& adj) {
  return std::visit(
      [](const auto& a) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, GridAdjacency>) {
          return a.rows * a.cols;
        } else {
          return a.num_vertices();
        }
      },
      adj);
}

FusionGraph as_graph(const Adjacency& adj) {
  if (const auto* g = std::get_if<GridAdjacency>(&adj)) return FusionGraph::grid(g->rows, g->cols);
  return std::get<FusionGraph>(adj);
}

}  // namespace tvmax
