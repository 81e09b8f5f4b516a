#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcr/graph.hpp"
#include "gcr/rng.hpp"

namespace gcr {

/// Exact partition of the vertices into dense, non-empty clusters;
/// the unit of randomization.
struct Clustering {
  std::vector<int> assignment;            // vertex -> cluster id
  std::vector<std::vector<int>> members;  // cluster id -> vertices

  int num_vertices() const { return static_cast<int>(assignment.size()); }
  int num_clusters() const { return static_cast<int>(members.size()); }

  static Clustering from_assignment(std::vector<int> assignment) {
    Clustering cl;
    cl.assignment = std::move(assignment);
    int nc = 0;
    for (std::size_t v = 0; v < cl.assignment.size(); ++v) {
      int c = cl.assignment[v];
      if (c < 0)
        throw std::invalid_argument("vertex " + std::to_string(v) +
                                    " has negative cluster id");
      nc = std::max(nc, c + 1);
    }
    cl.members.assign(nc, {});
    for (std::size_t v = 0; v < cl.assignment.size(); ++v)
      cl.members[cl.assignment[v]].push_back(static_cast<int>(v));
    for (int c = 0; c < nc; ++c)
      if (cl.members[c].empty())
        throw std::invalid_argument("cluster ids not dense: cluster " +
                                    std::to_string(c) + " is empty");
    return cl;
  }
};

inline Clustering singleton_clustering(const Graph& g) {
  std::vector<int> a(g.num_vertices());
  std::iota(a.begin(), a.end(), 0);
  return Clustering::from_assignment(std::move(a));
}

/// Contiguous blocks of c vertices by index; the final block may be smaller.
inline Clustering cycle_block_clustering(int n, int c) {
  if (c < 1 || c > n) throw std::invalid_argument("block size must be in [1,n]");
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) a[i] = i / c;
  return Clustering::from_assignment(std::move(a));
}

/// Output of the 3-net construction: greedy centers pairwise at graph
/// distance >= 3, every cluster contained in B_2 of its center.
struct NetClusteringTrace {
  std::vector<int> centers;  // in selection order
  Clustering clustering;     // cluster j belongs to centers[j]
};

enum class ScanOrder { ByIndex, Random };

/// Greedy 3-net clustering: scan vertices, pick each still-unmarked one as a
/// center and mark its B_2 ball; then assign every vertex to the nearest
/// center, ties to the lowest center index.
inline NetClusteringTrace net3_clustering(const Graph& g,
                                          ScanOrder order = ScanOrder::ByIndex,
                                          std::uint64_t seed = 0) {
  int n = g.num_vertices();
  std::vector<int> scan(n);
  std::iota(scan.begin(), scan.end(), 0);
  if (order == ScanOrder::Random) {
    SplitMix64 rng(seed);
    for (int i = n - 1; i > 0; --i)
      std::swap(scan[i], scan[rng.next() % static_cast<std::uint64_t>(i + 1)]);
  }

  std::vector<char> marked(n, 0);
  std::vector<int> centers;
  for (int v : scan) {
    if (marked[v]) continue;
    centers.push_back(v);
    for (int u : ball(g, v, 2)) marked[u] = 1;
  }

  // Multi-source BFS from all centers at once. Centers enter the queue in
  // index order, so the first visit of any vertex comes from the
  // lowest-index center among those at minimal distance.
  std::vector<int> owner(n, -1);
  std::queue<int> q;
  for (int j = 0; j < static_cast<int>(centers.size()); ++j) {
    owner[centers[j]] = j;
    q.push(centers[j]);
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w : g.neighbors(u)) {
      if (owner[w] < 0) {
        owner[w] = owner[u];
        q.push(w);
      }
    }
  }
  // every vertex is within distance 2 of some center by construction
  NetClusteringTrace trace;
  trace.centers = centers;
  trace.clustering = Clustering::from_assignment(std::move(owner));
  return trace;
}

// --- per-vertex connected-cluster structure ---------------------------------

/// For each vertex i, the set S_i of clusters meeting {i} union N_i, with
/// w_ij = number of neighbors of i in cluster j. The own cluster is always
/// listed (possibly with weight 0). Stored as a CSR over vertices with
/// entries sorted by cluster id.
struct ExposureWeights {
  std::vector<int> offsets;   // n+1
  std::vector<int> clusters;  // sorted within each vertex
  std::vector<int> weights;
  std::vector<int> own_cluster;  // per vertex
  std::vector<int> degree;       // per vertex, cached

  int num_vertices() const { return static_cast<int>(own_cluster.size()); }
  int s(int i) const { return offsets[i + 1] - offsets[i]; }
  std::span<const int> vertex_clusters(int i) const {
    return {clusters.data() + offsets[i],
            static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
  }
  std::span<const int> vertex_weights(int i) const {
    return {weights.data() + offsets[i],
            static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
  }
  int own_weight(int i) const {
    auto cs = vertex_clusters(i);
    auto it = std::lower_bound(cs.begin(), cs.end(), own_cluster[i]);
    return weights[offsets[i] + static_cast<int>(it - cs.begin())];
  }
};

inline ExposureWeights exposure_weights(const Graph& g, const Clustering& cl) {
  int n = g.num_vertices();
  if (cl.num_vertices() != n)
    throw std::invalid_argument("clustering does not match graph size");
  ExposureWeights ew;
  ew.offsets.assign(n + 1, 0);
  ew.own_cluster.resize(n);
  ew.degree.resize(n);
  std::vector<std::pair<int, int>> local;  // (cluster, weight)
  for (int i = 0; i < n; ++i) {
    local.clear();
    for (int w : g.neighbors(i)) local.emplace_back(cl.assignment[w], 1);
    local.emplace_back(cl.assignment[i], 0);  // own cluster, no self edge
    std::sort(local.begin(), local.end());
    int last = -1;
    for (auto [c, wt] : local) {
      if (c != last) {
        ew.clusters.push_back(c);
        ew.weights.push_back(wt);
        last = c;
      } else {
        ew.weights.back() += wt;
      }
    }
    ew.offsets[i + 1] = static_cast<int>(ew.clusters.size());
    ew.own_cluster[i] = cl.assignment[i];
    ew.degree[i] = g.degree(i);
  }
  return ew;
}

// --- clustering file I/O -----------------------------------------------------
//
// Format: lines "vertex_id cluster_id", '#' comments; must form an exact
// partition with dense ids.

inline Clustering load_clustering(std::istream& in,
                                  const std::string& name = "<stream>") {
  std::vector<int> assignment;
  std::vector<char> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    long long v, c;
    if (!(ls >> v)) continue;
    if (!(ls >> c))
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": expected \"vertex cluster\"");
    if (v < 0 || c < 0)
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": negative id");
    if (v >= static_cast<long long>(assignment.size())) {
      assignment.resize(v + 1, -1);
      seen.resize(v + 1, 0);
    }
    if (seen[v])
      throw std::runtime_error(name + ": duplicate assignment for vertex " +
                               std::to_string(v));
    seen[v] = 1;
    assignment[v] = static_cast<int>(c);
  }
  for (std::size_t v = 0; v < assignment.size(); ++v)
    if (!seen[v])
      throw std::runtime_error(name + ": missing assignment for vertex " +
                               std::to_string(v));
  return Clustering::from_assignment(std::move(assignment));
}

inline Clustering load_clustering_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open clustering file: " + path);
  return load_clustering(in, path);
}

inline void save_clustering(const Clustering& cl, std::ostream& out) {
  for (int v = 0; v < cl.num_vertices(); ++v)
    out << v << " " << cl.assignment[v] << "\n";
}

inline void save_clustering_file(const Clustering& cl, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  save_clustering(cl, out);
}

}  // namespace gcr
