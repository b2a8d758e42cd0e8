#pragma once

// Undirected weighted graph stored as a flat edge array plus a CSR adjacency.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "gapdilate/diagnostics.hpp"

namespace gapdilate {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Signed incidence vector x_e: +1 at i_pos, -1 at i_neg.
struct IncidenceRow {
  NodeId i_pos = 0;
  NodeId i_neg = 0;
  double w = 1.0;
};

inline IncidenceRow incidence_row(const Edge& e) {
  return {std::min(e.u, e.v), std::max(e.u, e.v), e.w};
}

class Graph {
 public:
  Graph() = default;

  /// Validates and canonicalizes the edge list: endpoints are reordered so
  /// that u < v and zero-weight edges are dropped. Self-loops, negative or
  /// non-finite weights, out-of-range endpoints and repeated pairs throw.
  Graph(std::size_t n, std::vector<Edge> edges) : n_(n) {
    if (n > std::numeric_limits<NodeId>::max())
      throw InputError("graph: node count exceeds 32-bit node ids");
    edges_.reserve(edges.size());
    for (const Edge& raw : edges) {
      if (raw.u >= n || raw.v >= n)
        throw InputError("graph: edge (" + std::to_string(raw.u) + ", " + std::to_string(raw.v) +
                         ") out of range for n = " + std::to_string(n));
      if (raw.u == raw.v) throw InputError("graph: self-loop at node " + std::to_string(raw.u));
      if (!std::isfinite(raw.w) || raw.w < 0.0)
        throw InputError("graph: edge weight must be finite and nonnegative");
      if (raw.w == 0.0) continue;
      edges_.push_back({std::min(raw.u, raw.v), std::max(raw.u, raw.v), raw.w});
    }
    if (edges_.size() > std::numeric_limits<EdgeId>::max())
      throw InputError("graph: edge count exceeds 32-bit edge ids");
    build_adjacency();
  }

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
  }
  std::span<const double> neighbor_weights(NodeId i) const {
    return {adj_w_.data() + offsets_[i], adj_w_.data() + offsets_[i + 1]};
  }
  /// Edge ids incident to node i, ordered by neighbor id.
  std::span<const EdgeId> incident_edges(NodeId i) const {
    return {adj_e_.data() + offsets_[i], adj_e_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  double weighted_degree(NodeId i) const { return wdeg_[i]; }
  std::span<const double> weighted_degrees() const { return wdeg_; }

  /// Raw CSR arrays for hot kernels.
  std::span<const std::size_t> csr_offsets() const { return offsets_; }
  std::span<const NodeId> csr_columns() const { return adj_; }
  std::span<const double> csr_weights() const { return adj_w_; }

  bool unit_weights() const { return unit_weights_; }

  bool has_edge(NodeId a, NodeId b) const {
    if (a >= n_ || b >= n_ || a == b) return false;
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  /// Position of node b within neighbors(a), or degree(a) if absent.
  std::size_t neighbor_position(NodeId a, NodeId b) const {
    auto nb = neighbors(a);
    auto it = std::lower_bound(nb.begin(), nb.end(), b);
    if (it == nb.end() || *it != b) return nb.size();
    return static_cast<std::size_t>(it - nb.begin());
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  void build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adj_.resize(2 * edges_.size());
    adj_w_.resize(2 * edges_.size());
    adj_e_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t id = 0; id < edges_.size(); ++id) {
      const Edge& e = edges_[id];
      adj_[fill[e.u]] = e.v;
      adj_w_[fill[e.u]] = e.w;
      adj_e_[fill[e.u]++] = static_cast<EdgeId>(id);
      adj_[fill[e.v]] = e.u;
      adj_w_[fill[e.v]] = e.w;
      adj_e_[fill[e.v]++] = static_cast<EdgeId>(id);
    }
    wdeg_.assign(n_, 0.0);
    unit_weights_ = true;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t lo = offsets_[i], hi = offsets_[i + 1];
      order.resize(hi - lo);
      std::iota(order.begin(), order.end(), lo);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return adj_[a] < adj_[b]; });
      std::vector<NodeId> c(order.size());
      std::vector<double> w(order.size());
      std::vector<EdgeId> ids(order.size());
      for (std::size_t p = 0; p < order.size(); ++p) {
        c[p] = adj_[order[p]];
        w[p] = adj_w_[order[p]];
        ids[p] = adj_e_[order[p]];
      }
      for (std::size_t p = 0; p < order.size(); ++p) {
        if (p > 0 && c[p] == c[p - 1])
          throw InputError("graph: duplicate edge {" + std::to_string(i) + ", " + std::to_string(c[p]) + "}");
        adj_[lo + p] = c[p];
        adj_w_[lo + p] = w[p];
        adj_e_[lo + p] = ids[p];
        wdeg_[i] += w[p];
        if (w[p] != 1.0) unit_weights_ = false;
      }
    }
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adj_;
  std::vector<double> adj_w_;
  std::vector<EdgeId> adj_e_;
  std::vector<double> wdeg_;
  bool unit_weights_ = true;
};

/// Connected component id per node (ids in order of first appearance).
inline std::vector<std::size_t> connected_components(const Graph& g) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(g.num_nodes(), unset);
  std::vector<NodeId> stack;
  std::size_t next = 0;
  for (std::size_t s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] != unset) continue;
    comp[s] = next;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      NodeId i = stack.back();
      stack.pop_back();
      for (NodeId j : g.neighbors(i))
        if (comp[j] == unset) {
          comp[j] = next;
          stack.push_back(j);
        }
    }
    ++next;
  }
  return comp;
}

inline bool is_connected(const Graph& g) {
  if (g.num_nodes() <= 1) return true;
  auto comp = connected_components(g);
  return std::all_of(comp.begin(), comp.end(), [](std::size_t c) { return c == 0; });
}

// ---------------------------------------------------------------------------
// Edge-list text format:
//   n m
//   u v [w]        (m lines, 0-indexed, weight defaults to 1)
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal representation.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw ComputeError("format_double: conversion failed");
  return std::string(buf, ptr);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
}

inline Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_content_line()) throw InputError("edge list: missing header line");
  std::istringstream header(line);
  long long n = -1, m = -1;
  if (!(header >> n >> m) || n < 0 || m < 0) throw InputError("edge list: header must be 'n m'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    if (!next_content_line())
      throw InputError("edge list: expected " + std::to_string(m) + " edges, found " + std::to_string(k));
    std::istringstream row(line);
    long long u = -1, v = -1;
    double w = 1.0;
    if (!(row >> u >> v) || u < 0 || v < 0)
      throw InputError("edge list: malformed edge at line " + std::to_string(line_no));
    if (!(row >> w)) {
      if (!row.eof()) throw InputError("edge list: malformed weight at line " + std::to_string(line_no));
      w = 1.0;
    }
    if (u >= n || v >= n)
      throw InputError("edge list: node id out of range at line " + std::to_string(line_no));
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
  }
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

inline Graph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("edge list: cannot open " + path.string());
  try {
    return read_edge_list(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ComputeError("cannot open " + path.string() + " for writing");
  write_edge_list(out, g);
  if (!out) throw ComputeError("write failed: " + path.string());
}

}  // namespace gapdilate
