#pragma once

// Edge incidence graph (nodes = original edges, adjacent iff they share an
// endpoint, every node carries a self-loop) and degree bounds.
//
// The incidence lists are implicit: the incidence list of e = {u, v} is the
// concatenation of the edges at u and the edges at v with e counted once, so
// deg_inc(e) = deg(u) + deg(v) - 1 and the r-th incident edge is found in O(1)
// from the node CSR. Materializing the lists would cost sum_e deg_inc(e) words,
// which is cubic in the clique size for the clique benchmark graphs.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/graph.hpp"

namespace gapdilate {

class EdgeIncidenceGraph {
 public:
  explicit EdgeIncidenceGraph(std::shared_ptr<const Graph> graph) : graph_(std::move(graph)) {
    if (!graph_ || graph_->num_edges() == 0)
      throw InputError("edge_incidence_graph: graph has no edges");
    const std::size_t m = graph_->num_edges();
    pos_in_v_.resize(m);
    for (std::size_t e = 0; e < m; ++e) {
      const Edge& ed = graph_->edge(e);
      pos_in_v_[e] = static_cast<std::uint32_t>(graph_->neighbor_position(ed.v, ed.u));
    }
  }

  explicit EdgeIncidenceGraph(const Graph& graph) : EdgeIncidenceGraph(std::make_shared<const Graph>(graph)) {}

  const Graph& graph() const { return *graph_; }
  std::size_t num_edges() const { return graph_->num_edges(); }

  std::size_t deg_inc(std::size_t e) const {
    const Edge& ed = graph_->edge(e);
    return graph_->degree(ed.u) + graph_->degree(ed.v) - 1;
  }

  /// r-th incident edge of e for r in [0, deg_inc(e)). Includes e itself.
  EdgeId neighbor(std::size_t e, std::size_t r) const {
    const Edge& ed = graph_->edge(e);
    const auto at_u = graph_->incident_edges(ed.u);
    if (r < at_u.size()) return at_u[r];
    r -= at_u.size();
    if (r >= pos_in_v_[e]) ++r;  // skip e's slot in v's list
    return graph_->incident_edges(ed.v)[r];
  }

  /// Materialized incidence list of e (self included), sorted by edge id.
  std::vector<EdgeId> incident(std::size_t e) const {
    std::vector<EdgeId> out;
    const std::size_t d = deg_inc(e);
    out.reserve(d);
    for (std::size_t r = 0; r < d; ++r) out.push_back(neighbor(e, r));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t max_deg_inc() const {
    std::size_t best = 0;
    for (std::size_t e = 0; e < num_edges(); ++e) best = std::max(best, deg_inc(e));
    return best;
  }

 private:
  std::shared_ptr<const Graph> graph_;
  std::vector<std::uint32_t> pos_in_v_;
};

inline EdgeIncidenceGraph edge_incidence_graph(const Graph& g) { return EdgeIncidenceGraph(g); }

struct DegreeBounds {
  std::size_t deg_star = 0;      // max unweighted node degree
  std::size_t deg_star_inc = 0;  // 2 deg_star - 1, bound on incidence-graph degree
  double lambda_upper = 0.0;     // 2 x max weighted degree, bound on lambda_max(L)
};

inline DegreeBounds degree_bounds(const Graph& g) {
  DegreeBounds b;
  double max_wdeg = 0.0;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    b.deg_star = std::max(b.deg_star, g.degree(static_cast<NodeId>(i)));
    max_wdeg = std::max(max_wdeg, g.weighted_degree(static_cast<NodeId>(i)));
  }
  b.deg_star_inc = b.deg_star > 0 ? 2 * b.deg_star - 1 : 0;
  b.lambda_upper = 2.0 * max_wdeg;
  return b;
}

}  // namespace gapdilate
