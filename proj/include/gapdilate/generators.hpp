#pragma once

// Seeded generators for the benchmark graph families: clique clusters joined by
// random short-circuit edges, the three-room grid-world transition graph, and
// the common-neighbors link-prediction completion of a degraded clique graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/graph.hpp"
#include "gapdilate/random.hpp"

namespace gapdilate {

struct CliqueSpec {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t max_shortcircuit = 25;
  std::size_t min_shortcircuit = 0;
  std::uint64_t seed = 0;

  std::string describe() const {
    return "clique(n=" + std::to_string(n) + ", k=" + std::to_string(k) + ", shortcircuit=" +
           std::to_string(min_shortcircuit) + ".." + std::to_string(max_shortcircuit) +
           ", seed=" + std::to_string(seed) + ")";
  }
};

struct MdpSpec {
  std::size_t s = 1;
  std::size_t h = 10;

  std::size_t rows() const { return 10 * s + 1; }
  std::size_t cols() const { return 30 * s + 1; }
  std::size_t door_height() const {
    const auto d = static_cast<std::size_t>(std::llround(static_cast<double>(rows()) / static_cast<double>(h)));
    return std::clamp<std::size_t>(d, 1, rows());
  }
  std::string describe() const {
    return "mdp(s=" + std::to_string(s) + ", h=" + std::to_string(h) + ")";
  }
};

struct LinkPredSpec {
  CliqueSpec base;
  double p_remove = 0.2;
  std::uint64_t seed = 0;

  std::string describe() const {
    return "linkpred(" + base.describe() + ", p_remove=" + format_double(p_remove) +
           ", seed=" + std::to_string(seed) + ")";
  }
};

struct LabeledGraph {
  Graph graph;
  std::vector<int> labels;
};

/// Clique sizes: n split as evenly as possible, larger cliques first.
inline std::vector<std::size_t> clique_sizes(std::size_t n, std::size_t k) {
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
  return sizes;
}

inline void validate(const CliqueSpec& spec) {
  if (spec.k < 2) throw InputError("clique spec: k = " + std::to_string(spec.k) + " must be at least 2");
  if (spec.n < spec.k)
    throw InputError("clique spec: k = " + std::to_string(spec.k) + " exceeds n = " + std::to_string(spec.n));
  if (spec.n / spec.k < 2)
    throw InputError("clique spec: clique size " + std::to_string(spec.n / spec.k) +
                     " < 2 (n = " + std::to_string(spec.n) + ", k = " + std::to_string(spec.k) + ")");
  if (spec.min_shortcircuit > spec.max_shortcircuit)
    throw InputError("clique spec: min_shortcircuit exceeds max_shortcircuit");
  const auto sizes = clique_sizes(spec.n, spec.k);
  const std::size_t pairs = sizes[spec.k - 1] * sizes[spec.k - 2];
  if (spec.max_shortcircuit > pairs)
    throw InputError("clique spec: max_shortcircuit = " + std::to_string(spec.max_shortcircuit) +
                     " exceeds the " + std::to_string(pairs) + " node pairs between the smallest cliques");
}

/// k complete subgraphs; each unordered clique pair receives c ~ U{min..max}
/// distinct cross edges between uniformly chosen endpoints.
inline LabeledGraph gen_clique_clusters(const CliqueSpec& spec) {
  validate(spec);
  const auto sizes = clique_sizes(spec.n, spec.k);
  std::vector<std::size_t> start(spec.k + 1, 0);
  for (std::size_t c = 0; c < spec.k; ++c) start[c + 1] = start[c] + sizes[c];

  std::vector<Edge> edges;
  std::size_t internal = 0;
  for (auto s : sizes) internal += s * (s - 1) / 2;
  edges.reserve(internal + spec.k * spec.k * spec.max_shortcircuit / 2);
  std::vector<int> labels(spec.n);
  for (std::size_t c = 0; c < spec.k; ++c) {
    for (std::size_t i = start[c]; i < start[c + 1]; ++i) {
      labels[i] = static_cast<int>(c);
      for (std::size_t j = i + 1; j < start[c + 1]; ++j)
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
    }
  }

  std::mt19937_64 rng(spec.seed);
  for (std::size_t a = 0; a < spec.k; ++a) {
    for (std::size_t b = a + 1; b < spec.k; ++b) {
      auto count = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(spec.min_shortcircuit),
                                                        static_cast<std::int64_t>(spec.max_shortcircuit)));
      count = std::min(count, sizes[a] * sizes[b]);
      std::set<std::pair<std::size_t, std::size_t>> chosen;
      while (chosen.size() < count) {
        const std::size_t u = start[a] + uniform_index(rng, sizes[a]);
        const std::size_t v = start[b] + uniform_index(rng, sizes[b]);
        if (chosen.emplace(u, v).second) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0});
      }
    }
  }
  return {Graph(spec.n, std::move(edges)), std::move(labels)};
}

/// Grid cell (row, col) of the three-room world is free unless it lies on a
/// wall column (10s and 20s) outside the vertically centered doorway.
inline bool mdp_cell_free(const MdpSpec& spec, std::size_t row, std::size_t col) {
  const std::size_t wall_a = 10 * spec.s, wall_b = 20 * spec.s;
  if (col != wall_a && col != wall_b) return true;
  const std::size_t door = spec.door_height();
  const std::size_t door_start = (spec.rows() - door) / 2;
  return row >= door_start && row < door_start + door;
}

/// Undirected 4-neighborhood transition graph of the three-room grid world.
/// Nodes are free cells in row-major order.
inline Graph gen_three_room_mdp(const MdpSpec& spec) {
  if (spec.s == 0) throw InputError("mdp spec: scale s must be positive");
  if (spec.h == 0) throw InputError("mdp spec: doorway denominator h must be positive");
  const std::size_t rows = spec.rows(), cols = spec.cols();
  constexpr auto blocked = static_cast<std::size_t>(-1);
  std::vector<std::size_t> id(rows * cols, blocked);
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (mdp_cell_free(spec, r, c)) id[r * cols + c] = n++;
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t a = id[r * cols + c];
      if (a == blocked) continue;
      if (c + 1 < cols && id[r * cols + c + 1] != blocked)
        edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(id[r * cols + c + 1]), 1.0});
      if (r + 1 < rows && id[(r + 1) * cols + c] != blocked)
        edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(id[(r + 1) * cols + c]), 1.0});
    }
  }
  return Graph(n, std::move(edges));
}

/// |N(i) & N(j)| for a non-adjacent pair.
inline std::size_t common_neighbors_score(const Graph& g, NodeId i, NodeId j) {
  if (i >= g.num_nodes() || j >= g.num_nodes()) throw InputError("common_neighbors_score: node out of range");
  if (i == j) throw InputError("common_neighbors_score: i == j");
  if (g.has_edge(i, j))
    throw InputError("common_neighbors_score: (" + std::to_string(i) + ", " + std::to_string(j) +
                     ") is already an edge");
  const auto a = g.neighbors(i), b = g.neighbors(j);
  std::size_t count = 0;
  auto p = a.begin();
  auto q = b.begin();
  while (p != a.end() && q != b.end()) {
    if (*p < *q) {
      ++p;
    } else if (*q < *p) {
      ++q;
    } else {
      ++count;
      ++p;
      ++q;
    }
  }
  return count;
}

struct LinkPredResult {
  Graph graph;                       // survivors (original weight) + predicted edges (normalized score)
  std::vector<Edge> removed;         // removed base edges, base order
  std::vector<std::size_t> scores;   // common-neighbors score per removed edge
  std::vector<int> labels;           // ground-truth clusters of the base graph (may be empty)
};

/// Re-adds each removed edge weighted by its common-neighbors score in the
/// degraded graph divided by the maximum score; zero-score edges are dropped.
inline LinkPredResult complete_with_predictions(const Graph& base, const std::vector<char>& removed_mask) {
  if (removed_mask.size() != base.num_edges())
    throw InputError("complete_with_predictions: mask length must equal the edge count");
  std::vector<Edge> survivors;
  LinkPredResult out{Graph(), {}, {}, {}};
  for (std::size_t e = 0; e < base.num_edges(); ++e) {
    if (removed_mask[e])
      out.removed.push_back(base.edge(e));
    else
      survivors.push_back(base.edge(e));
  }
  const Graph degraded(base.num_nodes(), survivors);
  std::size_t max_score = 0;
  for (const Edge& e : out.removed) {
    out.scores.push_back(common_neighbors_score(degraded, e.u, e.v));
    max_score = std::max(max_score, out.scores.back());
  }
  if (!out.removed.empty() && max_score == 0)
    warn("link prediction: every removed edge has zero common neighbors; no edges predicted");
  std::vector<Edge> edges;
  edges.reserve(base.num_edges());
  std::size_t r = 0;
  for (std::size_t e = 0; e < base.num_edges(); ++e) {
    Edge ed = base.edge(e);
    if (removed_mask[e]) {
      const std::size_t score = out.scores[r++];
      if (score == 0) continue;
      ed.w = static_cast<double>(score) / static_cast<double>(max_score);
    }
    edges.push_back(ed);
  }
  out.graph = Graph(base.num_nodes(), std::move(edges));
  return out;
}

inline constexpr int kLinkPredMaxAttempts = 100;

/// Removes each base edge independently with probability p_remove (retrying
/// with a fresh sub-seed until the survivors stay connected) and completes the
/// graph with common-neighbors predictions.
inline LinkPredResult degrade_and_complete(const LinkPredSpec& spec) {
  if (!(spec.p_remove >= 0.0 && spec.p_remove < 1.0))
    throw InputError("linkpred spec: p_remove must lie in [0, 1)");
  const LabeledGraph base = gen_clique_clusters(spec.base);
  const Graph& g = base.graph;
  for (int attempt = 0; attempt < kLinkPredMaxAttempts; ++attempt) {
    std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    std::vector<char> mask(g.num_edges(), 0);
    std::vector<Edge> survivors;
    survivors.reserve(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      mask[e] = uniform01(rng) < spec.p_remove ? 1 : 0;
      if (!mask[e]) survivors.push_back(g.edge(e));
    }
    if (!is_connected(Graph(g.num_nodes(), std::move(survivors)))) continue;
    LinkPredResult out = complete_with_predictions(g, mask);
    out.labels = base.labels;
    return out;
  }
  throw ComputeError("linkpred: degraded graph disconnected after " + std::to_string(kLinkPredMaxAttempts) +
                     " attempts for " + spec.describe());
}

}  // namespace gapdilate
