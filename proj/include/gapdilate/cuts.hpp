#pragma once

// Cut quadratic form, conductance and the exhaustive balanced-conductance
// oracle used to check Cheeger's inequality on small graphs.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gapdilate/diagnostics.hpp"
#include "gapdilate/graph.hpp"

namespace gapdilate {

/// sum_{(i,j)} w_ij (v_i - v_j)^2 for a +-1 indicator; equals 4x the crossing weight.
inline double cut_value(const Graph& g, std::span<const double> v) {
  if (v.size() != g.num_nodes()) throw InputError("cut_value: indicator length must equal n");
  for (double x : v)
    if (x != 1.0 && x != -1.0) throw InputError("cut_value: indicator entries must be +1 or -1");
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    const double d = v[e.u] - v[e.v];
    total += e.w * d * d;
  }
  return total;
}

struct CutStats {
  double cut = 0.0;
  double vol = 0.0;
};

namespace detail {
inline std::vector<char> subset_mask(const Graph& g, std::span<const NodeId> subset) {
  std::vector<char> in(g.num_nodes(), 0);
  for (NodeId i : subset) {
    if (i >= g.num_nodes()) throw InputError("conductance: node " + std::to_string(i) + " out of range");
    in[i] = 1;
  }
  return in;
}
}  // namespace detail

inline CutStats cut_stats(const Graph& g, std::span<const NodeId> subset) {
  const auto in = detail::subset_mask(g, subset);
  CutStats s;
  for (const Edge& e : g.edges())
    if (in[e.u] != in[e.v]) s.cut += e.w;
  for (std::size_t i = 0; i < g.num_nodes(); ++i)
    if (in[i]) s.vol += g.weighted_degree(static_cast<NodeId>(i));
  return s;
}

/// phi(S) = cut(S, S^c) / vol(S), vol(S) = sum of weighted degrees in S.
inline double conductance(const Graph& g, std::span<const NodeId> subset) {
  const auto in = detail::subset_mask(g, subset);
  std::size_t count = 0;
  for (char c : in) count += c != 0;
  if (count == 0) throw InputError("conductance: subset is empty");
  if (count == g.num_nodes()) throw InputError("conductance: subset is the whole node set");
  const CutStats s = cut_stats(g, subset);
  if (s.vol == 0.0) throw InputError("conductance: subset has zero volume");
  return s.cut / s.vol;
}

struct RhoResult {
  double rho = 0.0;
  std::vector<NodeId> best;
};

inline constexpr std::size_t kBruteForceMaxNodes = 20;

/// rho_G = min_S max{phi(S), phi(S^c)} by enumerating subsets containing node 0.
/// Subsets with zero volume on either side are treated as phi = +inf.
inline RhoResult brute_force_rho(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n > kBruteForceMaxNodes)
    throw InputError("brute_force_rho: n = " + std::to_string(n) + " exceeds the enumeration limit of " +
                     std::to_string(kBruteForceMaxNodes));
  if (n < 2) throw InputError("brute_force_rho: need at least two nodes");
  const std::uint32_t full = (1u << n) - 1u;
  double total_vol = 0.0;
  for (std::size_t i = 0; i < n; ++i) total_vol += g.weighted_degree(static_cast<NodeId>(i));
  RhoResult out{std::numeric_limits<double>::infinity(), {}};
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask < full; mask += 2) {
    double cut = 0.0, vol = 0.0;
    for (const Edge& e : g.edges())
      if (((mask >> e.u) & 1u) != ((mask >> e.v) & 1u)) cut += e.w;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) vol += g.weighted_degree(static_cast<NodeId>(i));
    const double other = total_vol - vol;
    if (vol <= 0.0 || other <= 0.0) continue;
    const double value = std::max(cut / vol, cut / other);
    if (value < out.rho) {
      out.rho = value;
      best_mask = mask;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if ((best_mask >> i) & 1u) out.best.push_back(static_cast<NodeId>(i));
  return out;
}

}  // namespace gapdilate
