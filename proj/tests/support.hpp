#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "gapdilate/graph.hpp"
#include "gapdilate/laplacian.hpp"
#include "gapdilate/random.hpp"

namespace gapdilate::testing {

inline Graph single_edge() { return Graph(2, {{0, 1, 1.0}}); }
inline Graph path3() { return Graph(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }
inline Graph triangle() { return Graph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}); }
inline Graph star3() { return Graph(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}); }

inline Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({NodeId(i), NodeId(i + 1), 1.0});
  return Graph(n, e);
}

/// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline Graph two_triangles_bridge() {
  return Graph(6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}, {2, 3, 1.0}});
}

inline Graph two_triangles() {
  return Graph(6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}});
}

/// Erdos-Renyi G(n, p); weights uniform in [0.5, 2) when weighted.
inline Graph random_graph(std::size_t n, double p, std::uint64_t seed, bool weighted = false) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) e.push_back({NodeId(i), NodeId(j), weighted ? 0.5 + 1.5 * uniform01(rng) : 1.0});
  return Graph(n, e);
}

/// Random connected graph: a random spanning tree plus G(n, p) extras.
inline Graph random_connected_graph(std::size_t n, double p, std::uint64_t seed, bool weighted = false) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> e;
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  auto add = [&](std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    if (present[a][b]) return;
    present[a][b] = 1;
    e.push_back({NodeId(a), NodeId(b), weighted ? 0.5 + 1.5 * uniform01(rng) : 1.0});
  };
  for (std::size_t i = 1; i < n; ++i) add(i, uniform_index(rng, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) add(i, j);
  return Graph(n, e);
}

/// D - A assembled from the adjacency definition, independent of the edge-sum route.
inline Eigen::MatrixXd dense_d_minus_a(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) a(e.u, e.v) = a(e.v, e.u) = e.w;
  Eigen::VectorXd d = a.rowwise().sum();
  return Eigen::MatrixXd(d.asDiagonal()) - a;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = standard_normal(rng);
  return v;
}

}  // namespace gapdilate::testing
