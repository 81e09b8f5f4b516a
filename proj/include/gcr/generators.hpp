#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gcr/graph.hpp"
#include "gcr/rng.hpp"

namespace gcr {

inline Graph gen_cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, edges);
}

/// kth power of the cycle: each vertex connected to the k nearest
/// neighbors on each side, so the graph is 2k-regular.
inline Graph gen_cycle_power(int n, int k) {
  if (k < 1) throw std::invalid_argument("cycle power needs k >= 1");
  if (n <= 2 * k) throw std::invalid_argument("cycle power needs n > 2k");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i)
    for (int j = 1; j <= k; ++j) edges.emplace_back(i, (i + j) % n);
  return Graph::from_edges(n, edges);
}

/// Random geometric graph: n points i.i.d. uniform in the unit cube of the
/// given dimension, edge iff Euclidean distance <= radius. Deterministic
/// given the seed.
inline Graph gen_random_geometric(int n, double radius, int dim,
                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("rgg needs n >= 1");
  if (radius <= 0) throw std::invalid_argument("rgg needs radius > 0");
  if (dim < 1) throw std::invalid_argument("rgg needs dim >= 1");
  SplitMix64 rng(seed);
  std::vector<double> pts(static_cast<std::size_t>(n) * dim);
  for (double& x : pts) x = rng.next_u01();

  // grid bucketing keeps this near-linear for small radii
  int cells = std::max(1, static_cast<int>(1.0 / radius));
  auto cell_of = [&](int i, int d) {
    int c = static_cast<int>(pts[static_cast<std::size_t>(i) * dim + d] * cells);
    return std::min(c, cells - 1);
  };
  std::int64_t num_buckets = 1;
  for (int d = 0; d < dim; ++d) {
    num_buckets *= cells;
    if (num_buckets > 8 * static_cast<std::int64_t>(n)) {  // cap memory
      cells = std::max(1, cells / 2);
      num_buckets = 1;
      d = -1;
    }
  }
  auto bucket_id = [&](const std::vector<int>& c) {
    std::int64_t id = 0;
    for (int d = 0; d < dim; ++d) id = id * cells + c[d];
    return id;
  };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(num_buckets));
  std::vector<int> c(dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) c[d] = cell_of(i, d);
    buckets[bucket_id(c)].push_back(i);
  }

  double r2 = radius * radius;
  auto close = [&](int i, int j) {
    double s = 0;
    for (int d = 0; d < dim; ++d) {
      double dx = pts[static_cast<std::size_t>(i) * dim + d] -
                  pts[static_cast<std::size_t>(j) * dim + d];
      s += dx * dx;
    }
    return s <= r2;
  };

  std::vector<std::pair<int, int>> edges;
  std::vector<int> nb(dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) c[d] = cell_of(i, d);
    // enumerate neighboring cells (offsets in {-1,0,1}^dim)
    int combos = 1;
    for (int d = 0; d < dim; ++d) combos *= 3;
    for (int m = 0; m < combos; ++m) {
      int mm = m;
      bool ok = true;
      for (int d = 0; d < dim; ++d) {
        int off = mm % 3 - 1;
        mm /= 3;
        nb[d] = c[d] + off;
        if (nb[d] < 0 || nb[d] >= cells) ok = false;
      }
      if (!ok) continue;
      for (int j : buckets[bucket_id(nb)])
        if (j > i && close(i, j)) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace gcr
