#pragma once

// Random-walk estimators of Laplacian powers.
//
// Expanding L^l = (sum_e w_e x_e x_e^T)^l gives
//
//     L^l = sum over edge sequences c = (e_1..e_l) of  alpha_c x_{e_1} x_{e_l}^T,
//     alpha_c = prod_j w_{e_j} * prod_j x_{e_j}^T x_{e_{j+1}},
//
// and alpha_c vanishes unless consecutive edges share an endpoint, i.e. unless
// c is a walk in the edge incidence graph. Walks are drawn by picking e_1
// uniformly and then moving uniformly over incident edges (self included), so
// a walk has probability p = (1/|E|) prod_{i<l} 1/deg_inc(e_i).
//
// Importance mode averages alpha_c x_{e_1} (x_{e_l}^T v) / p. Rejection mode
// accepts a walk with probability p_min / p, which makes accepted walks
// uniform, and divides the accepted sum by p_min.
//
// Every walk owns a SplitMix64 stream keyed by (seed, walk index) and the
// reduction runs in walk-index order, so estimates do not depend on the
// number of walker threads.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/graph.hpp"
#include "gapdilate/incidence.hpp"
#include "gapdilate/laplacian.hpp"
#include "gapdilate/random.hpp"

namespace gapdilate {

enum class SamplerMode { importance, rejection };

struct SamplerConfig {
  int ell = 1;
  unsigned n_walkers = 1;
  std::size_t walks_per_estimate = 1000;
  SamplerMode mode = SamplerMode::importance;
  std::uint64_t seed = 0;

  void validate() const {
    if (ell < 1) throw InputError("sampler: ell must be at least 1");
    if (walks_per_estimate < 1) throw InputError("sampler: walks_per_estimate must be at least 1");
    if (n_walkers < 1) throw InputError("sampler: n_walkers must be at least 1");
  }
};

struct Walk {
  std::vector<EdgeId> edges;
  double log_p = 0.0;        // log of the forward sampling probability
  double alpha_chain = 1.0;  // prod of pairwise incidence products times prod of edge weights

  double p_walk() const { return std::exp(log_p); }
};

/// x_{e1}^T x_{e2}: 0 disjoint, -1 serial, +1 converging or diverging, 2 repeated.
inline int alpha(const Graph& g, std::size_t e1, std::size_t e2) {
  if (e1 >= g.num_edges() || e2 >= g.num_edges()) throw InputError("alpha: edge index out of range");
  if (e1 == e2) return 2;
  const IncidenceRow a = incidence_row(g.edge(e1));
  const IncidenceRow b = incidence_row(g.edge(e2));
  return static_cast<int>(a.i_pos == b.i_pos) - static_cast<int>(a.i_pos == b.i_neg) -
         static_cast<int>(a.i_neg == b.i_pos) + static_cast<int>(a.i_neg == b.i_neg);
}

namespace detail {
inline int alpha_unchecked(const Edge& a, const Edge& b) {
  // edges are stored with u < v, so u is the +1 entry
  return static_cast<int>(a.u == b.u) - static_cast<int>(a.u == b.v) - static_cast<int>(a.v == b.u) +
         static_cast<int>(a.v == b.v);
}
}  // namespace detail

/// One forward walk of ell edges.
template <class Engine>
Walk sample_walk(const EdgeIncidenceGraph& inc, int ell, Engine& rng) {
  if (ell < 1) throw InputError("sample_walk: ell must be at least 1");
  const Graph& g = inc.graph();
  Walk w;
  w.edges.reserve(static_cast<std::size_t>(ell));
  std::size_t e = uniform_index(rng, g.num_edges());
  w.edges.push_back(static_cast<EdgeId>(e));
  w.log_p = -std::log(static_cast<double>(g.num_edges()));
  w.alpha_chain = g.edge(e).w;
  for (int step = 1; step < ell; ++step) {
    const std::size_t d = inc.deg_inc(e);
    const std::size_t next = inc.neighbor(e, uniform_index(rng, d));
    w.log_p -= std::log(static_cast<double>(d));
    w.alpha_chain *= (next == e ? 2.0 : detail::alpha_unchecked(g.edge(e), g.edge(next))) * g.edge(next).w;
    e = next;
    w.edges.push_back(static_cast<EdgeId>(e));
  }
  return w;
}

/// log p_min = -ell log(deg_star_inc) - log m.
inline double log_p_min(std::size_t m, std::size_t deg_star_inc, int ell) {
  if (m == 0 || deg_star_inc == 0 || ell < 1) throw InputError("p_min: arguments must be positive");
  return -static_cast<double>(ell) * std::log(static_cast<double>(deg_star_inc)) - std::log(static_cast<double>(m));
}

/// (deg_star_inc)^{-ell} / m; may underflow to 0 for long walks, use log_p_min then.
inline double p_min(std::size_t m, std::size_t deg_star_inc, int ell) {
  return std::exp(log_p_min(m, deg_star_inc, ell));
}

/// Accepts with probability p_min / p_walk.
template <class Engine>
bool rejection_filter(const Walk& walk, double log_pmin, Engine& rng) {
  const double log_ratio = log_pmin - walk.log_p;
  if (log_ratio > 1e-12) throw ComputeError("rejection_filter: p_min exceeds the walk probability");
  return uniform01(rng) < std::exp(log_ratio);
}

struct ChainCountEstimate {
  std::size_t trials = 0;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  double chain_count = 0.0;  // acceptance_rate / p_min, unbiased for the number of incidence walks
};

/// Acceptance statistics of the rejection scheme.
inline ChainCountEstimate estimate_chain_count(const EdgeIncidenceGraph& inc, int ell, std::size_t trials,
                                               std::uint64_t seed) {
  const DegreeBounds b = degree_bounds(inc.graph());
  const double lp = log_p_min(inc.num_edges(), b.deg_star_inc, ell);
  ChainCountEstimate out;
  out.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng(derive_seed(seed, t));
    const Walk w = sample_walk(inc, ell, rng);
    if (rejection_filter(w, lp, rng)) ++out.accepted;
  }
  out.acceptance_rate = trials ? static_cast<double>(out.accepted) / static_cast<double>(trials) : 0.0;
  out.chain_count = out.acceptance_rate / std::exp(lp);
  return out;
}

namespace detail {

struct WalkContribution {
  NodeId pos = 0;  // +1 entry of x_{e_1}
  NodeId neg = 0;  // -1 entry of x_{e_1}
  double scale = 0.0;
};

// Runs walks [0, count) and reduces sum_walk scale * x_{e_1} in index order.
// `body(index, rng, accept_counts)` returns the contribution of one walk.
template <class Body>
Vector run_walks(std::size_t n, std::size_t count, unsigned walkers, std::size_t prefix_slots,
                 std::vector<std::size_t>& accept_counts, Body&& body) {
  constexpr std::size_t kChunk = std::size_t{1} << 15;
  Vector y = Vector::Zero(static_cast<Eigen::Index>(n));
  accept_counts.assign(prefix_slots, 0);
  std::vector<WalkContribution> buf;
  walkers = std::max(1u, walkers);
  std::vector<std::vector<std::size_t>> counts(walkers, std::vector<std::size_t>(prefix_slots, 0));
  for (std::size_t start = 0; start < count; start += kChunk) {
    const std::size_t len = std::min(kChunk, count - start);
    buf.resize(len);
    auto work = [&](unsigned t) {
      for (std::size_t i = t; i < len; i += walkers) buf[i] = body(start + i, counts[t]);
    };
    if (walkers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(walkers);
      for (unsigned t = 0; t < walkers; ++t) pool.emplace_back(work, t);
    }
    for (const auto& c : buf) {
      y[c.pos] += c.scale;
      y[c.neg] -= c.scale;
    }
  }
  for (const auto& c : counts)
    for (std::size_t i = 0; i < prefix_slots; ++i) accept_counts[i] += c[i];
  return y / static_cast<double>(count);
}

// One length-l walk whose prefixes feed sum_{i=1..l} gamma_i * (estimate of L^i v).
inline WalkContribution polynomial_walk(const EdgeIncidenceGraph& inc, std::span<const double> gamma,
                                        const Vector& v, SamplerMode mode, std::span<const double> log_pmin,
                                        std::uint64_t key, std::vector<std::size_t>& accepted) {
  const Graph& g = inc.graph();
  const int ell = static_cast<int>(gamma.size()) - 1;
  SplitMix64 rng(key);
  std::size_t e = uniform_index(rng, g.num_edges());
  const Edge first = g.edge(e);
  const double m = static_cast<double>(g.num_edges());
  // ratio = alpha_chain / p for importance; alpha_chain alone for rejection
  double chain = first.w;
  double inv_p = m;
  double log_p = -std::log(m);
  double scale = 0.0;
  for (int i = 1; i <= ell; ++i) {
    if (i > 1) {
      const std::size_t d = inc.deg_inc(e);
      const std::size_t next = inc.neighbor(e, uniform_index(rng, d));
      chain *= (next == e ? 2.0 : alpha_unchecked(g.edge(e), g.edge(next))) * g.edge(next).w;
      inv_p *= static_cast<double>(d);
      log_p -= std::log(static_cast<double>(d));
      e = next;
    }
    const Edge& last = g.edge(e);
    const double proj = v[last.u] - v[last.v];
    if (mode == SamplerMode::importance) {
      if (gamma[i] != 0.0) scale += gamma[i] * chain * inv_p * proj;
    } else {
      const double u = uniform01(rng);
      if (u < std::exp(log_pmin[i] - log_p)) {
        ++accepted[i];
        if (gamma[i] != 0.0) scale += gamma[i] * chain * std::exp(-log_pmin[i]) * proj;
      }
    }
  }
  return {first.u, first.v, scale};
}

}  // namespace detail

/// Unbiased estimate of (sum_i gamma_i L^i) v, every walk serving all powers
/// through its prefixes. gamma has ell + 1 entries (gamma_0 multiplies v).
inline Vector estimate_polynomial_matvec(const EdgeIncidenceGraph& inc, std::span<const double> gamma,
                                         const Vector& v, const SamplerConfig& cfg) {
  const Graph& g = inc.graph();
  if (gamma.empty()) throw InputError("estimate_polynomial_matvec: empty coefficient list");
  if (static_cast<std::size_t>(v.size()) != g.num_nodes())
    throw InputError("estimate_polynomial_matvec: vector length does not match n");
  if (cfg.walks_per_estimate < 1) throw InputError("sampler: walks_per_estimate must be at least 1");
  const int ell = static_cast<int>(gamma.size()) - 1;
  Vector result = gamma[0] * v;
  const bool any = std::any_of(gamma.begin() + 1, gamma.end(), [](double c) { return c != 0.0; });
  if (ell == 0 || !any) return result;

  const DegreeBounds b = degree_bounds(g);
  std::vector<double> lpm(static_cast<std::size_t>(ell) + 1, 0.0);
  for (int i = 1; i <= ell; ++i) lpm[i] = log_p_min(g.num_edges(), b.deg_star_inc, i);
  std::vector<std::size_t> accepted;
  Vector est = detail::run_walks(
      g.num_nodes(), cfg.walks_per_estimate, cfg.n_walkers, static_cast<std::size_t>(ell) + 1, accepted,
      [&](std::size_t idx, std::vector<std::size_t>& counts) {
        return detail::polynomial_walk(inc, gamma, v, cfg.mode, lpm, derive_seed(cfg.seed, idx), counts);
      });
  if (cfg.mode == SamplerMode::rejection) {
    for (int i = 1; i <= ell; ++i)
      if (gamma[i] != 0.0 && accepted[i] == 0)
        throw ComputeError("rejection sampler: no walk of length " + std::to_string(i) + " accepted in " +
                           std::to_string(cfg.walks_per_estimate) +
                           " trials; increase walks_per_estimate or use importance mode");
  }
  return result + est;
}

/// Unbiased estimate of L^ell v.
inline Vector estimate_power_matvec(const EdgeIncidenceGraph& inc, int ell, const Vector& v,
                                    const SamplerConfig& cfg) {
  if (ell < 1) throw InputError("estimate_power_matvec: ell must be at least 1");
  std::vector<double> gamma(static_cast<std::size_t>(ell) + 1, 0.0);
  gamma[ell] = 1.0;
  return estimate_polynomial_matvec(inc, gamma, v, cfg);
}

/// Per-prefix estimates of L^i v, i = 1..ell, all from the same walks
/// (column i-1 holds the power-i estimate).
inline Matrix estimate_prefix_powers(const EdgeIncidenceGraph& inc, int ell, const Vector& v,
                                     const SamplerConfig& cfg) {
  Matrix out(v.size(), ell);
  // The prefix-i estimate is the polynomial estimate with gamma = e_i under the
  // same walk keys, so reuse that path column by column.
  for (int i = 1; i <= ell; ++i) {
    std::vector<double> gamma(static_cast<std::size_t>(ell) + 1, 0.0);
    gamma[i] = 1.0;
    out.col(i - 1) = estimate_polynomial_matvec(inc, gamma, v, cfg);
  }
  return out;
}

inline constexpr double kEnumerationBudget = 1e7;

/// Exact sum over every incidence walk of alpha_c x_{e_1} x_{e_l}^T; equals L^ell.
inline Matrix enumerate_chains(const Graph& g, int ell) {
  if (ell < 1) throw InputError("enumerate_chains: ell must be at least 1");
  const std::size_t n = g.num_nodes(), m = g.num_edges();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (m == 0) return out;
  const DegreeBounds b = degree_bounds(g);
  const double log_budget = std::log(static_cast<double>(m)) + (ell - 1) * std::log(static_cast<double>(b.deg_star_inc));
  if (log_budget > std::log(kEnumerationBudget))
    throw InputError("enumerate_chains: |E| deg_inc^(ell-1) exceeds the enumeration budget of 1e7");
  const EdgeIncidenceGraph inc(g);
  std::vector<std::vector<EdgeId>> lists(m);
  for (std::size_t e = 0; e < m; ++e) lists[e] = inc.incident(e);

  struct Frame {
    EdgeId edge;
    double chain;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (std::size_t e1 = 0; e1 < m; ++e1) {
    const Edge& first = g.edge(e1);
    stack.assign(1, {static_cast<EdgeId>(e1), first.w, 0});
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (static_cast<int>(stack.size()) == ell) {
        const Edge& last = g.edge(top.edge);
        // chain * x_{e1} x_{el}^T
        out(first.u, last.u) += top.chain;
        out(first.u, last.v) -= top.chain;
        out(first.v, last.u) -= top.chain;
        out(first.v, last.v) += top.chain;
        stack.pop_back();
        continue;
      }
      const auto& nbrs = lists[top.edge];
      if (top.next == nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const EdgeId nxt = nbrs[top.next++];
      const double a = nxt == top.edge ? 2.0 : detail::alpha_unchecked(g.edge(top.edge), g.edge(nxt));
      const double chain = top.chain * a * g.edge(nxt).w;
      stack.push_back({nxt, chain, 0});
    }
  }
  return out;
}

}  // namespace gapdilate
