#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcr {

/// Immutable undirected simple graph in CSR form: sorted adjacency,
/// no self-loops, no parallel edges. Safe to share across threads.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Builds from an edge list. Edges are symmetrized and deduplicated;
  // self-loops are rejected.
  static Graph from_edges(int num_vertices,
                          const std::vector<std::pair<int, int>>& edges) {
    if (num_vertices < 0) throw std::invalid_argument("negative vertex count");
    std::vector<std::pair<int, int>> sym;
    sym.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
        throw std::out_of_range("edge endpoint out of range: (" +
                                std::to_string(u) + "," + std::to_string(v) + ")");
      if (u == v)
        throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
      sym.emplace_back(u, v);
      sym.emplace_back(v, u);
    }
    std::sort(sym.begin(), sym.end());
    sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

    Graph g;
    g.offsets_.assign(num_vertices + 1, 0);
    g.neighbors_.reserve(sym.size());
    for (auto [u, v] : sym) {
      g.offsets_[u + 1]++;
      g.neighbors_.push_back(v);
    }
    for (int i = 0; i < num_vertices; ++i) g.offsets_[i + 1] += g.offsets_[i];
    return g;
  }

  int num_vertices() const { return static_cast<int>(offsets_.size()) - 1; }

  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(neighbors_.size()) / 2;
  }

  int degree(int v) const {
    check_vertex(v);
    return offsets_[v + 1] - offsets_[v];
  }

  std::span<const int> neighbors(int v) const {
    check_vertex(v);
    return {neighbors_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }

  bool has_edge(int u, int v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  void check_vertex(int v) const {
    if (v < 0 || v >= num_vertices())
      throw std::out_of_range("invalid vertex id " + std::to_string(v));
  }

 private:
  std::vector<int> offsets_;    // size n+1
  std::vector<int> neighbors_;  // sorted per vertex
};

/// Sorted set of vertex ids.
using VertexSet = std::vector<int>;

// --- edge-list I/O ---------------------------------------------------------
//
// Format: lines "u v" (whitespace separated, 0-based), '#' starts a comment,
// optional first data line "n <count>" declares the vertex count.

inline Graph load_graph(std::istream& in, const std::string& name = "<stream>") {
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int declared_n = -1;
  int max_id = -1;
  int line_no = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;  // blank
    if (!(ls >> b) || (ls >> std::ws, !ls.eof()))
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": expected two tokens per line");
    if (first_data_line && a == "n") {
      declared_n = std::stoi(b);
      first_data_line = false;
      continue;
    }
    first_data_line = false;
    int u, v;
    try {
      u = std::stoi(a);
      v = std::stoi(b);
    } catch (const std::exception&) {
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": not an integer pair");
    }
    if (u < 0 || v < 0)
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": negative vertex id");
    if (u == v)
      throw std::runtime_error(name + ":" + std::to_string(line_no) +
                               ": self-loop at vertex " + std::to_string(u));
    max_id = std::max({max_id, u, v});
    edges.emplace_back(u, v);
  }
  int n = declared_n >= 0 ? declared_n : max_id + 1;
  if (declared_n >= 0 && max_id >= declared_n)
    throw std::runtime_error(name + ": vertex id " + std::to_string(max_id) +
                             " >= declared n " + std::to_string(declared_n));
  return Graph::from_edges(n, edges);
}

inline Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load_graph(in, path);
}

inline void save_graph(const Graph& g, std::ostream& out) {
  out << "n " << g.num_vertices() << "\n";
  for (int u = 0; u < g.num_vertices(); ++u)
    for (int v : g.neighbors(u))
      if (u < v) out << u << " " << v << "\n";
}

inline void save_graph_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  save_graph(g, out);
}

// --- traversal primitives --------------------------------------------------

/// BFS ball B_r(v): all vertices within r hops of v, inclusive.
inline VertexSet ball(const Graph& g, int v, int r) {
  g.check_vertex(v);
  if (r < 0) throw std::invalid_argument("negative radius");
  std::vector<int> dist(g.num_vertices(), -1);
  std::queue<int> q;
  dist[v] = 0;
  q.push(v);
  VertexSet out{v};
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (dist[u] == r) continue;
    for (int w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        out.push_back(w);
        q.push(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Component labels, dense from 0 in order of first appearance.
inline std::vector<int> connected_components(const Graph& g) {
  int n = g.num_vertices();
  std::vector<int> label(n, -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : g.neighbors(u)) {
        if (label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

// --- restricted-growth diagnostics ------------------------------------------

struct GrowthReport {
  // max_ratio[r-1] = max_v |B_{r+1}(v)| / |B_r(v)| over vertices whose
  // B_r has not yet saturated the whole graph, for r = 1..r_max.
  std::vector<double> max_ratio;
  double kappa_hat = 1.0;
};

/// Exact per-radius growth ratios. Saturated balls (|B_r| = n) are excluded
/// so finite graphs report meaningful growth constants.
inline GrowthReport growth_report(const Graph& g, int r_max) {
  if (r_max < 1) throw std::invalid_argument("r_max must be >= 1");
  int n = g.num_vertices();
  GrowthReport rep;
  rep.max_ratio.assign(r_max, 1.0);
  std::vector<int> dist(n, -1);
  std::vector<int> touched;
  std::vector<std::int64_t> size_at(r_max + 2);
  for (int v = 0; v < n; ++v) {
    // single BFS to depth r_max+1, recording cumulative ball sizes
    std::fill(size_at.begin(), size_at.end(), 0);
    touched.clear();
    std::queue<int> q;
    dist[v] = 0;
    touched.push_back(v);
    q.push(v);
    size_at[0] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      if (dist[u] > r_max) continue;
      for (int w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          touched.push_back(w);
          if (dist[w] <= r_max + 1) size_at[dist[w]]++;
          if (dist[w] <= r_max) q.push(w);
        }
      }
    }
    for (int r = 1; r <= r_max + 1; ++r) size_at[r] += size_at[r - 1];
    // ratios |B_{r+1}|/|B_r| for r >= 1 only; r=0 growth is unrestricted
    for (int r = 1; r <= r_max; ++r) {
      std::int64_t br = size_at[r];
      std::int64_t brn = size_at[r + 1];
      if (br >= n) continue;  // saturated
      double ratio = static_cast<double>(brn) / static_cast<double>(br);
      if (ratio > rep.max_ratio[r - 1]) rep.max_ratio[r - 1] = ratio;
    }
    for (int u : touched) dist[u] = -1;
  }
  for (double r : rep.max_ratio) rep.kappa_hat = std::max(rep.kappa_hat, r);
  return rep;
}

}  // namespace gcr
