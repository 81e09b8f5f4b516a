#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "gcr/graph.hpp"

namespace gcr {

// Smallest integer k with k >= q*d, robust to floating rounding.
inline int fractional_threshold(double q, int d) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("q must be in [0,1]");
  int k = static_cast<int>(std::ceil(q * d));
  while (k > 0 && static_cast<double>(k - 1) >= q * d) --k;
  while (static_cast<double>(k) < q * d) ++k;
  return k;
}

/// Heterogeneous k-core restricted to a vertex subset: the unique maximal
/// set S within `alive` such that every v in S has at least thresholds[v]
/// neighbors inside S. Iterative peeling to a fixed point; the result is
/// order-independent.
inline std::vector<char> heterogeneous_core_mask(const Graph& g,
                                                 std::span<const int> thresholds,
                                                 std::vector<char> alive) {
  int n = g.num_vertices();
  if (static_cast<int>(thresholds.size()) != n ||
      static_cast<int>(alive.size()) != n)
    throw std::invalid_argument("thresholds/alive size mismatch");
  std::vector<int> inner_deg(n, 0);
  std::vector<int> worklist;
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    int d = 0;
    for (int w : g.neighbors(v))
      if (alive[w]) ++d;
    inner_deg[v] = d;
    if (d < thresholds[v]) worklist.push_back(v);
  }
  while (!worklist.empty()) {
    int v = worklist.back();
    worklist.pop_back();
    if (!alive[v]) continue;
    alive[v] = 0;
    for (int w : g.neighbors(v)) {
      if (!alive[w]) continue;
      if (--inner_deg[w] < thresholds[w]) worklist.push_back(w);
    }
  }
  return alive;
}

inline VertexSet mask_to_set(const std::vector<char>& mask) {
  VertexSet out;
  for (int v = 0; v < static_cast<int>(mask.size()); ++v)
    if (mask[v]) out.push_back(v);
  return out;
}

inline VertexSet heterogeneous_k_core(const Graph& g,
                                      std::span<const int> thresholds) {
  return mask_to_set(heterogeneous_core_mask(
      g, thresholds, std::vector<char>(g.num_vertices(), 1)));
}

/// Fractional q-core of the subgraph induced on `members`, with thresholds
/// taken against degrees in the full graph g: keep v while it retains at
/// least ceil(q * deg_G(v)) neighbors inside the surviving set.
inline VertexSet fractional_q_core(const Graph& g, const VertexSet& members,
                                   double q) {
  int n = g.num_vertices();
  std::vector<char> alive(n, 0);
  for (int v : members) {
    g.check_vertex(v);
    alive[v] = 1;
  }
  std::vector<int> thr(n, 0);
  for (int v : members) thr[v] = fractional_threshold(q, g.degree(v));
  return mask_to_set(heterogeneous_core_mask(g, thr, std::move(alive)));
}

}  // namespace gcr
