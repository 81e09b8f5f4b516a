#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gcr/clustering.hpp"
#include "gcr/core.hpp"
#include "gcr/graph.hpp"
#include "gcr/rng.hpp"

namespace gcr {

enum class Arm : int { Control = 0, Treatment = 1 };

inline int arm_bit(Arm a) { return a == Arm::Treatment ? 1 : 0; }
inline double arm_prob(Arm a, double p) {
  return a == Arm::Treatment ? p : 1.0 - p;
}

enum class ExposureKind {
  FullNeighborhood,
  AbsoluteK,
  FractionalQ,
  Component,
  KCore,
  FractionalQCore,
};

/// Which condition defines sigma_i^x. Neighborhood kinds admit exact
/// probabilities; component/core kinds are evaluated by Monte Carlo.
struct ExposureSpec {
  ExposureKind kind = ExposureKind::FullNeighborhood;
  int k = 1;      // AbsoluteK / KCore
  double q = 1.0; // FractionalQ / FractionalQCore

  bool is_neighborhood() const {
    return kind == ExposureKind::FullNeighborhood ||
           kind == ExposureKind::AbsoluteK ||
           kind == ExposureKind::FractionalQ;
  }

  // Same-arm neighbor count required for a vertex of degree d.
  // Absolute-k falls back to full exposure when d < k; fractional uses
  // ceil(q*d).
  int threshold(int d) const {
    switch (kind) {
      case ExposureKind::FullNeighborhood: return d;
      case ExposureKind::AbsoluteK:
      case ExposureKind::KCore: return std::min(k, d);
      case ExposureKind::FractionalQ:
      case ExposureKind::FractionalQCore: return fractional_threshold(q, d);
      case ExposureKind::Component: break;
    }
    throw std::logic_error("threshold undefined for component exposure");
  }

  // Grammar: full | abs:<k> | frac:<q> | component | kcore:<k> | fqcore:<q>
  static ExposureSpec parse(const std::string& text) {
    ExposureSpec s;
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto need_int = [&] {
      if (tail.empty()) throw std::invalid_argument("spec '" + text + "' needs :<k>");
      int v = std::stoi(tail);
      if (v < 1) throw std::invalid_argument("spec k must be >= 1");
      return v;
    };
    auto need_frac = [&] {
      if (tail.empty()) throw std::invalid_argument("spec '" + text + "' needs :<q>");
      double v = std::stod(tail);
      if (v < 0.0 || v > 1.0) throw std::invalid_argument("spec q must be in [0,1]");
      return v;
    };
    if (head == "full") s.kind = ExposureKind::FullNeighborhood;
    else if (head == "abs") { s.kind = ExposureKind::AbsoluteK; s.k = need_int(); }
    else if (head == "frac") { s.kind = ExposureKind::FractionalQ; s.q = need_frac(); }
    else if (head == "component") s.kind = ExposureKind::Component;
    else if (head == "kcore") { s.kind = ExposureKind::KCore; s.k = need_int(); }
    else if (head == "fqcore") { s.kind = ExposureKind::FractionalQCore; s.q = need_frac(); }
    else throw std::invalid_argument("unknown exposure spec: " + text);
    return s;
  }

  std::string to_string() const {
    switch (kind) {
      case ExposureKind::FullNeighborhood: return "full";
      case ExposureKind::AbsoluteK: return "abs:" + std::to_string(k);
      case ExposureKind::FractionalQ: {
        std::string qs = std::to_string(q);
        return "frac:" + qs;
      }
      case ExposureKind::Component: return "component";
      case ExposureKind::KCore: return "kcore:" + std::to_string(k);
      case ExposureKind::FractionalQCore: return "fqcore:" + std::to_string(q);
    }
    return "?";
  }
};

/// Cluster coins plus the per-vertex treatment bits they induce.
struct Assignment {
  std::vector<char> cluster_coins;  // per cluster, 1 = treatment
  std::vector<char> z;              // per vertex

  static Assignment from_coins(const Clustering& cl, std::vector<char> coins) {
    if (static_cast<int>(coins.size()) != cl.num_clusters())
      throw std::invalid_argument("coin vector does not match cluster count");
    Assignment a;
    a.cluster_coins = std::move(coins);
    a.z.resize(cl.num_vertices());
    for (int v = 0; v < cl.num_vertices(); ++v)
      a.z[v] = a.cluster_coins[cl.assignment[v]];
    return a;
  }
};

// --- exposure indicators -----------------------------------------------------

/// Evaluates exposure indicators for whole assignments. Precomputes the
/// graph structure needed by the spec (component labels, core thresholds)
/// so repeated evaluation over Monte Carlo replicates stays cheap.
class ExposureEvaluator {
 public:
  ExposureEvaluator(const Graph& g, ExposureSpec spec)
      : g_(g), spec_(spec) {
    int n = g.num_vertices();
    if (spec.kind == ExposureKind::Component) {
      component_ = connected_components(g);
    } else {
      thresholds_.resize(n);
      for (int v = 0; v < n; ++v) thresholds_[v] = spec.threshold(g.degree(v));
    }
  }

  /// Indicator of z in sigma_i^x for every vertex i at once.
  std::vector<char> indicators(std::span<const char> z, Arm arm) const {
    int n = g_.num_vertices();
    if (static_cast<int>(z.size()) != n)
      throw std::invalid_argument("assignment length mismatch");
    int x = arm_bit(arm);
    std::vector<char> out(n, 0);
    switch (spec_.kind) {
      case ExposureKind::FullNeighborhood:
      case ExposureKind::AbsoluteK:
      case ExposureKind::FractionalQ: {
        for (int i = 0; i < n; ++i) {
          if (z[i] != x) continue;
          int cnt = 0;
          for (int w : g_.neighbors(i)) cnt += (z[w] == x);
          out[i] = cnt >= thresholds_[i];
        }
        break;
      }
      case ExposureKind::Component: {
        // a component is exposed iff every vertex in it has z == x
        int nc = 0;
        for (int c : component_) nc = std::max(nc, c + 1);
        std::vector<char> comp_ok(nc, 1);
        for (int i = 0; i < n; ++i)
          if (z[i] != x) comp_ok[component_[i]] = 0;
        for (int i = 0; i < n; ++i) out[i] = comp_ok[component_[i]];
        break;
      }
      case ExposureKind::KCore:
      case ExposureKind::FractionalQCore: {
        std::vector<char> alive(n);
        for (int i = 0; i < n; ++i) alive[i] = (z[i] == x);
        out = heterogeneous_core_mask(g_, thresholds_, std::move(alive));
        break;
      }
    }
    return out;
  }

  const ExposureSpec& spec() const { return spec_; }

 private:
  const Graph& g_;
  ExposureSpec spec_;
  std::vector<int> thresholds_;
  std::vector<int> component_;
};

inline bool is_exposed(const Graph& g, const Clustering& cl, const Assignment& a,
                       ExposureSpec spec, Arm arm, int i) {
  g.check_vertex(i);
  (void)cl;
  ExposureEvaluator ev(g, spec);
  return ev.indicators(a.z, arm)[i];
}

// --- exact probabilities (weighted Poisson-binomial DP) ----------------------

/// PMF of sum(w_j * X_j) for independent Bernoulli(p) X_j, as a dense vector
/// over 0..sum(w). O(s * sum(w)).
inline std::vector<double> weighted_sum_pmf(std::span<const int> weights,
                                            double p) {
  int total = 0;
  for (int w : weights) {
    if (w < 0) throw std::invalid_argument("negative weight");
    total += w;
  }
  std::vector<double> pmf(total + 1, 0.0);
  pmf[0] = 1.0;
  int reach = 0;
  for (int w : weights) {
    for (int t = reach; t >= 0; --t) {
      double m = pmf[t];
      if (m == 0.0) continue;
      pmf[t] = m * (1.0 - p);
      pmf[t + w] += m * p;
    }
    reach += w;
  }
  return pmf;
}

/// Pr[sum(w_j X_j) >= T]; 1 when T <= 0.
inline double pmf_tail_ge(const std::vector<double>& pmf, int t) {
  if (t <= 0) return 1.0;
  if (t > static_cast<int>(pmf.size()) - 1) return 0.0;
  double s = 0.0;
  for (int v = static_cast<int>(pmf.size()) - 1; v >= t; --v) s += pmf[v];
  return s;
}

/// Tail probability Pr[sum(w_j X_j) >= T] for Bernoulli(p) coins.
inline double dp_tail(std::span<const int> weights, double p, int t) {
  if (t <= 0) return 1.0;
  return pmf_tail_ge(weighted_sum_pmf(weights, p), t);
}

namespace detail {

inline void check_p(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("treatment probability must be in (0,1)");
}

// Weights of the clusters in S_i other than i's own cluster.
inline std::vector<int> other_cluster_weights(const ExposureWeights& ew, int i) {
  std::vector<int> out;
  auto cs = ew.vertex_clusters(i);
  auto ws = ew.vertex_weights(i);
  for (std::size_t t = 0; t < cs.size(); ++t)
    if (cs[t] != ew.own_cluster[i]) out.push_back(ws[t]);
  return out;
}

}  // namespace detail

/// Exact exposure probability for a neighborhood condition under independent
/// cluster randomization: the own-cluster coin fixes z_i (and w_own same-arm
/// neighbors); the remaining clusters form a weighted Poisson-binomial sum.
inline double exposure_probability_exact(const ExposureWeights& ew, int i,
                                         double p, ExposureSpec spec, Arm arm) {
  detail::check_p(p);
  if (!spec.is_neighborhood())
    throw std::invalid_argument(
        "exact probabilities are only available for neighborhood conditions");
  double px = arm_prob(arm, p);
  int k = spec.threshold(ew.degree[i]);
  auto others = detail::other_cluster_weights(ew, i);
  return px * dp_tail(others, px, k - ew.own_weight(i));
}

/// Pr[z_i = x and >= k same-arm neighbors] for every k = 0..d_i, from one
/// pass over the weighted-sum PMF. Non-increasing in k; the entry at k = d_i
/// is the full-exposure probability.
inline std::vector<double> exposure_distribution(const ExposureWeights& ew,
                                                 int i, double p, Arm arm) {
  detail::check_p(p);
  double px = arm_prob(arm, p);
  auto others = detail::other_cluster_weights(ew, i);
  auto pmf = weighted_sum_pmf(others, px);
  int d = ew.degree[i];
  int own = ew.own_weight(i);
  std::vector<double> out(d + 1);
  // suffix sums once, then shift by the own-cluster contribution
  std::vector<double> tail(pmf.size() + 1, 0.0);
  for (int v = static_cast<int>(pmf.size()) - 1; v >= 0; --v)
    tail[v] = tail[v + 1] + pmf[v];
  for (int k = 0; k <= d; ++k) {
    int t = k - own;
    double pr;
    if (t <= 0) pr = 1.0;
    else if (t >= static_cast<int>(pmf.size())) pr = 0.0;
    else pr = tail[t];
    out[k] = px * pr;
  }
  return out;
}

/// Exact joint probability Pr[Z in sigma_i^x and Z in sigma_j^y] for
/// neighborhood conditions: enumerate the coins of the shared clusters
/// S_i cap S_j; conditioned on those, the two residual threshold events are
/// independent and each reduces to a weighted Poisson-binomial tail.
/// Returns nullopt when the shared set exceeds max_shared (enumeration cost).
inline std::optional<double> joint_exposure_probability_exact(
    const ExposureWeights& ew, int i, int j, double p, ExposureSpec spec_x,
    Arm arm_x, ExposureSpec spec_y, Arm arm_y, int max_shared = 20) {
  detail::check_p(p);
  if (!spec_x.is_neighborhood() || !spec_y.is_neighborhood())
    throw std::invalid_argument(
        "exact joint probabilities need neighborhood conditions");

  auto ci = ew.vertex_clusters(i);
  auto wi = ew.vertex_weights(i);
  auto cj = ew.vertex_clusters(j);
  auto wj = ew.vertex_weights(j);

  // shared clusters with each vertex's weight there (0 if only own-cluster)
  std::vector<int> shared;                 // cluster ids
  std::vector<int> shared_wi, shared_wj;   // aligned with `shared`
  {
    std::size_t a = 0, b = 0;
    while (a < ci.size() && b < cj.size()) {
      if (ci[a] < cj[b]) ++a;
      else if (ci[a] > cj[b]) ++b;
      else {
        shared.push_back(ci[a]);
        shared_wi.push_back(wi[a]);
        shared_wj.push_back(wj[b]);
        ++a; ++b;
      }
    }
  }
  int ns = static_cast<int>(shared.size());
  if (ns == 0)
    return exposure_probability_exact(ew, i, p, spec_x, arm_x) *
           exposure_probability_exact(ew, j, p, spec_y, arm_y);
  if (ns > max_shared) return std::nullopt;

  struct Side {
    int k;                       // required same-arm neighbors
    int own_cluster;
    int own_weight;
    bool own_shared;
    std::vector<int> private_w;  // weights of unshared clusters, minus own
    double px;
    int x;                       // arm bit
    std::vector<double> tail;    // suffix tails of private pmf
  };
  auto make_side = [&](int v, std::span<const int> cs, std::span<const int> ws,
                       ExposureSpec spec, Arm arm) {
    Side s;
    s.k = spec.threshold(ew.degree[v]);
    s.own_cluster = ew.own_cluster[v];
    s.own_weight = ew.own_weight(v);
    s.px = arm_prob(arm, p);
    s.x = arm_bit(arm);
    s.own_shared = std::binary_search(shared.begin(), shared.end(), s.own_cluster);
    for (std::size_t t = 0; t < cs.size(); ++t) {
      if (cs[t] == s.own_cluster) continue;
      if (std::binary_search(shared.begin(), shared.end(), cs[t])) continue;
      s.private_w.push_back(ws[t]);
    }
    auto pmf = weighted_sum_pmf(s.private_w, s.px);
    s.tail.assign(pmf.size() + 1, 0.0);
    for (int t = static_cast<int>(pmf.size()) - 1; t >= 0; --t)
      s.tail[t] = s.tail[t + 1] + pmf[t];
    return s;
  };
  Side si = make_side(i, ci, wi, spec_x, arm_x);
  Side sj = make_side(j, cj, wj, spec_y, arm_y);

  auto side_term = [&](const Side& s, std::span<const int> shared_w,
                       std::uint32_t mask) -> double {
    // fixed same-arm contribution from shared clusters in this branch
    int fixed = 0;
    double zfactor = 1.0;
    for (int t = 0; t < ns; ++t) {
      int coin = (mask >> t) & 1;
      if (coin == s.x) fixed += shared_w[t];
      if (s.own_shared && shared[t] == s.own_cluster && coin != s.x) return 0.0;
    }
    if (!s.own_shared) {
      zfactor = s.px;       // own coin must come up x
      fixed += s.own_weight;
    }
    int need = s.k - fixed;
    double pr;
    if (need <= 0) pr = 1.0;
    else if (need >= static_cast<int>(s.tail.size())) pr = 0.0;
    else pr = s.tail[need];
    return zfactor * pr;
  };

  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << ns); ++mask) {
    double branch = 1.0;
    for (int t = 0; t < ns; ++t)
      branch *= ((mask >> t) & 1) ? p : 1.0 - p;
    double ti = side_term(si, shared_wi, mask);
    if (ti == 0.0) continue;
    double tj = side_term(sj, shared_wj, mask);
    total += branch * ti * tj;
  }
  return total;
}

// --- Monte Carlo probabilities -----------------------------------------------

struct McProbabilities {
  std::vector<double> pi1, pi0;          // frequency estimates
  std::vector<double> stderr1, stderr0;  // binomial standard errors
  long long replicates = 0;
};

/// Per-vertex exposure frequencies over seeded replicates of the cluster
/// randomization. Replicate r draws its coins from an independent stream
/// derived from (seed, r), so any evaluation order gives the same result.
inline McProbabilities exposure_probability_mc(const Graph& g,
                                               const Clustering& cl, double p,
                                               ExposureSpec spec,
                                               long long replicates,
                                               std::uint64_t seed) {
  detail::check_p(p);
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  int n = g.num_vertices();
  int nc = cl.num_clusters();
  ExposureEvaluator ev(g, spec);
  std::vector<long long> hits1(n, 0), hits0(n, 0);
  std::vector<char> coins(nc);
  std::vector<char> z(n);
  for (long long r = 0; r < replicates; ++r) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    for (int c = 0; c < nc; ++c) coins[c] = rng.next_bernoulli(p);
    for (int v = 0; v < n; ++v) z[v] = coins[cl.assignment[v]];
    auto e1 = ev.indicators(z, Arm::Treatment);
    auto e0 = ev.indicators(z, Arm::Control);
    for (int v = 0; v < n; ++v) {
      hits1[v] += e1[v];
      hits0[v] += e0[v];
    }
  }
  McProbabilities out;
  out.replicates = replicates;
  out.pi1.resize(n);
  out.pi0.resize(n);
  out.stderr1.resize(n);
  out.stderr0.resize(n);
  double R = static_cast<double>(replicates);
  for (int v = 0; v < n; ++v) {
    out.pi1[v] = hits1[v] / R;
    out.pi0[v] = hits0[v] / R;
    out.stderr1[v] = std::sqrt(out.pi1[v] * (1.0 - out.pi1[v]) / R);
    out.stderr0[v] = std::sqrt(out.pi0[v] * (1.0 - out.pi0[v]) / R);
  }
  return out;
}

// --- probability tables ------------------------------------------------------

enum class ProbMethod { Exact, MonteCarlo };

struct JointKey {
  int i, j;
  int x, y;  // arm bits
  bool operator<(const JointKey& o) const {
    return std::tie(i, j, x, y) < std::tie(o.i, o.j, o.x, o.y);
  }
};

struct ProbabilityTable {
  std::vector<double> pi1, pi0;
  ProbMethod method = ProbMethod::Exact;
  std::vector<double> stderr1, stderr0;  // empty when exact
  long long mc_replicates = 0;
  std::map<JointKey, double> joint;

  double pi(int i, Arm arm) const {
    return arm == Arm::Treatment ? pi1[i] : pi0[i];
  }
};

/// All unordered pairs {i,j} with S_i cap S_j nonempty; only these have
/// dependent exposure indicators.
inline std::vector<std::pair<int, int>> dependent_pairs(
    const ExposureWeights& ew) {
  int n = ew.num_vertices();
  int nc = 0;
  for (int c : ew.clusters) nc = std::max(nc, c + 1);
  std::vector<std::vector<int>> touching(nc);
  for (int i = 0; i < n; ++i)
    for (int c : ew.vertex_clusters(i)) touching[c].push_back(i);
  std::vector<std::pair<int, int>> pairs;
  for (auto& vs : touching)
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = a + 1; b < vs.size(); ++b)
        pairs.emplace_back(vs[a], vs[b]);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

/// Builds the full table for a neighborhood spec: exact marginals for both
/// arms plus exact joints for every dependent pair and arm combination.
inline ProbabilityTable build_probability_table(const ExposureWeights& ew,
                                                double p, ExposureSpec spec,
                                                bool with_joints = true) {
  int n = ew.num_vertices();
  ProbabilityTable pt;
  pt.method = ProbMethod::Exact;
  pt.pi1.resize(n);
  pt.pi0.resize(n);
  for (int i = 0; i < n; ++i) {
    pt.pi1[i] = exposure_probability_exact(ew, i, p, spec, Arm::Treatment);
    pt.pi0[i] = exposure_probability_exact(ew, i, p, spec, Arm::Control);
  }
  if (with_joints) {
    for (auto [i, j] : dependent_pairs(ew)) {
      for (Arm x : {Arm::Treatment, Arm::Control}) {
        for (Arm y : {Arm::Treatment, Arm::Control}) {
          auto v = joint_exposure_probability_exact(ew, i, j, p, spec, x, spec, y);
          if (!v)
            throw std::runtime_error(
                "joint enumeration too large for exact table; use Monte Carlo");
          pt.joint[{i, j, arm_bit(x), arm_bit(y)}] = *v;
        }
      }
    }
  }
  return pt;
}

/// Monte Carlo table for component/core specs.
inline ProbabilityTable build_probability_table_mc(const Graph& g,
                                                   const Clustering& cl,
                                                   double p, ExposureSpec spec,
                                                   long long replicates,
                                                   std::uint64_t seed) {
  auto mc = exposure_probability_mc(g, cl, p, spec, replicates, seed);
  ProbabilityTable pt;
  pt.method = ProbMethod::MonteCarlo;
  pt.pi1 = std::move(mc.pi1);
  pt.pi0 = std::move(mc.pi0);
  pt.stderr1 = std::move(mc.stderr1);
  pt.stderr0 = std::move(mc.stderr0);
  pt.mc_replicates = mc.replicates;
  return pt;
}

}  // namespace gcr
