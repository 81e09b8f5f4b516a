#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcr/clustering.hpp"
#include "gcr/exposure.hpp"
#include "gcr/graph.hpp"
#include "gcr/rng.hpp"

namespace gcr {

/// Ground-truth responses for simulation: y1[i] when i is network exposed
/// to treatment, y0[i] when exposed to control.
struct PotentialOutcomes {
  std::vector<double> y1, y0;

  static PotentialOutcomes uniform(int n, double y1v, double y0v) {
    PotentialOutcomes po;
    po.y1.assign(n, y1v);
    po.y0.assign(n, y0v);
    return po;
  }
};

/// Average treatment effect between the all-treatment and all-control
/// universes.
inline double true_effect(const PotentialOutcomes& po) {
  if (po.y1.size() != po.y0.size() || po.y1.empty())
    throw std::invalid_argument("potential outcomes malformed");
  double s = 0.0;
  for (std::size_t i = 0; i < po.y1.size(); ++i) s += po.y1[i] - po.y0[i];
  return s / static_cast<double>(po.y1.size());
}

/// One i.i.d. Bernoulli(p) coin per cluster, deterministic given the seed.
inline Assignment sample_assignment(const Clustering& cl, double p,
                                    std::uint64_t seed) {
  detail::check_p(p);
  SplitMix64 rng(seed);
  std::vector<char> coins(cl.num_clusters());
  for (auto& c : coins) c = rng.next_bernoulli(p);
  return Assignment::from_coins(cl, std::move(coins));
}

/// A realized experiment: responses plus per-arm exposure flags.
struct ObservedExperiment {
  std::vector<double> response;  // observed Y_i(Z); meaningful where flagged
  std::vector<char> exposed1, exposed0;
};

inline ObservedExperiment observe(const Graph& g, const Assignment& a,
                                  const PotentialOutcomes& po,
                                  ExposureSpec spec) {
  ExposureEvaluator ev(g, spec);
  ObservedExperiment obs;
  obs.exposed1 = ev.indicators(a.z, Arm::Treatment);
  obs.exposed0 = ev.indicators(a.z, Arm::Control);
  int n = g.num_vertices();
  obs.response.resize(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (obs.exposed1[i]) obs.response[i] = po.y1[i];
    else if (obs.exposed0[i]) obs.response[i] = po.y0[i];
  }
  return obs;
}

struct EffectEstimate {
  double tau_hat = 0.0;
  double y1_total = 0.0, y0_total = 0.0;  // the two inverse-weighted arm means
  int exposed1_count = 0, exposed0_count = 0;
};

/// Horvitz-Thompson estimate: inverse-probability-weighted difference of the
/// two arm totals. Vertices exposed to neither arm contribute zero; a flagged
/// vertex with nonpositive probability is a hard error.
inline EffectEstimate ht_estimate(const ObservedExperiment& obs,
                                  const ProbabilityTable& pt, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  EffectEstimate est;
  for (int i = 0; i < n; ++i) {
    if (obs.exposed1[i] && obs.exposed0[i])
      throw std::runtime_error("vertex " + std::to_string(i) +
                               " flagged for both arms");
    if (obs.exposed1[i]) {
      if (!(pt.pi1[i] > 0.0))
        throw std::runtime_error("vertex " + std::to_string(i) +
                                 " exposed to treatment with zero probability");
      est.y1_total += obs.response[i] / pt.pi1[i];
      est.exposed1_count++;
    } else if (obs.exposed0[i]) {
      if (!(pt.pi0[i] > 0.0))
        throw std::runtime_error("vertex " + std::to_string(i) +
                                 " exposed to control with zero probability");
      est.y0_total += obs.response[i] / pt.pi0[i];
      est.exposed0_count++;
    }
  }
  est.y1_total /= n;
  est.y0_total /= n;
  est.tau_hat = est.y1_total - est.y0_total;
  return est;
}

// --- analytic variance --------------------------------------------------------

struct VarianceDecomposition {
  double var_y1 = 0.0, var_y0 = 0.0, cov = 0.0;
  double total() const { return var_y1 + var_y0 - 2.0 * cov; }
};

namespace detail {

inline double joint_lookup(const ProbabilityTable& pt, int i, int j, Arm x,
                           Arm y) {
  // stored once per unordered pair with i < j
  if (i > j) {
    std::swap(i, j);
    std::swap(x, y);
  }
  auto it = pt.joint.find({i, j, arm_bit(x), arm_bit(y)});
  if (it == pt.joint.end())
    throw std::runtime_error("missing joint probability for dependent pair (" +
                             std::to_string(i) + "," + std::to_string(j) + ")");
  return it->second;
}

}  // namespace detail

/// Analytic variance of the HT estimator from exposure probabilities and
/// known potential outcomes. Pairs with independent assignments contribute
/// nothing and are skipped; every structurally dependent pair must have a
/// joint entry in the table.
inline VarianceDecomposition variance_analytic(const ExposureWeights& ew,
                                               const PotentialOutcomes& po,
                                               const ProbabilityTable& pt) {
  int n = ew.num_vertices();
  double n2 = static_cast<double>(n) * n;
  VarianceDecomposition out;

  for (int i = 0; i < n; ++i) {
    out.var_y1 += (1.0 - pt.pi1[i]) / pt.pi1[i] * po.y1[i] * po.y1[i] / n2;
    out.var_y0 += (1.0 - pt.pi0[i]) / pt.pi0[i] * po.y0[i] * po.y0[i] / n2;
    out.cov -= po.y1[i] * po.y0[i] / n2;
  }
  for (auto [i, j] : dependent_pairs(ew)) {
    // unordered pair contributes both (i,j) and (j,i) terms
    double p11 = detail::joint_lookup(pt, i, j, Arm::Treatment, Arm::Treatment);
    double p00 = detail::joint_lookup(pt, i, j, Arm::Control, Arm::Control);
    double p10 = detail::joint_lookup(pt, i, j, Arm::Treatment, Arm::Control);
    double p01 = detail::joint_lookup(pt, i, j, Arm::Control, Arm::Treatment);
    out.var_y1 += 2.0 * (p11 - pt.pi1[i] * pt.pi1[j]) /
                  (pt.pi1[i] * pt.pi1[j]) * po.y1[i] * po.y1[j] / n2;
    out.var_y0 += 2.0 * (p00 - pt.pi0[i] * pt.pi0[j]) /
                  (pt.pi0[i] * pt.pi0[j]) * po.y0[i] * po.y0[j] / n2;
    out.cov += (p10 - pt.pi1[i] * pt.pi0[j]) / (pt.pi1[i] * pt.pi0[j]) *
               po.y1[i] * po.y0[j] / n2;
    out.cov += (p01 - pt.pi0[i] * pt.pi1[j]) / (pt.pi0[i] * pt.pi1[j]) *
               po.y0[i] * po.y1[j] / n2;
  }
  return out;
}

// --- Monte Carlo variance -------------------------------------------------------

struct McVariance {
  double mean = 0.0;
  double variance = 0.0;       // unbiased sample variance of tau_hat
  double var_stderr = 0.0;     // moment-based standard error of the variance
  double mean_stderr = 0.0;
  long long replicates = 0;
};

namespace detail {

inline McVariance summarize_replicates(const std::vector<double>& taus) {
  long long r = static_cast<long long>(taus.size());
  McVariance out;
  out.replicates = r;
  double mean = std::accumulate(taus.begin(), taus.end(), 0.0) / r;
  double m2 = 0.0, m4 = 0.0;
  for (double t : taus) {
    double d = t - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  double s2 = m2 / (r - 1);
  m2 /= r;
  m4 /= r;
  out.mean = mean;
  out.variance = s2;
  out.mean_stderr = std::sqrt(s2 / r);
  // Var(s^2) ~ (m4 - (r-3)/(r-1) m2^2) / r
  double v = (m4 - (static_cast<double>(r) - 3) / (r - 1) * m2 * m2) / r;
  out.var_stderr = v > 0 ? std::sqrt(v) : 0.0;
  return out;
}

}  // namespace detail

/// Sample variance of tau_hat over seeded replicates of the cluster
/// randomization. Neighborhood specs use exact probabilities and a fast
/// cluster-level count; component/core specs estimate probabilities from the
/// same replicate stream (so every flagged vertex has a positive estimate)
/// and evaluate indicators by peeling.
inline McVariance variance_mc(const Graph& g, const Clustering& cl,
                              const PotentialOutcomes& po, double p,
                              ExposureSpec spec, long long replicates,
                              std::uint64_t seed) {
  detail::check_p(p);
  if (replicates < 2) throw std::invalid_argument("replicates must be >= 2");
  int n = g.num_vertices();
  int nc = cl.num_clusters();
  std::vector<double> taus;
  taus.reserve(replicates);

  if (spec.is_neighborhood()) {
    auto ew = exposure_weights(g, cl);
    std::vector<double> a1(n), a0(n);
    std::vector<int> kthr(n);
    for (int i = 0; i < n; ++i) {
      double pi1 = exposure_probability_exact(ew, i, p, spec, Arm::Treatment);
      double pi0 = exposure_probability_exact(ew, i, p, spec, Arm::Control);
      a1[i] = po.y1[i] / pi1 / n;
      a0[i] = po.y0[i] / pi0 / n;
      kthr[i] = spec.threshold(ew.degree[i]);
    }
    std::vector<char> coins(nc);
    for (long long r = 0; r < replicates; ++r) {
      SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      for (int c = 0; c < nc; ++c) coins[c] = rng.next_bernoulli(p);
      double tau = 0.0;
      for (int i = 0; i < n; ++i) {
        auto cs = ew.vertex_clusters(i);
        auto ws = ew.vertex_weights(i);
        int treated = 0;
        for (std::size_t t = 0; t < cs.size(); ++t)
          treated += coins[cs[t]] ? ws[t] : 0;
        if (coins[ew.own_cluster[i]]) {
          if (treated >= kthr[i]) tau += a1[i];
        } else {
          if (ew.degree[i] - treated >= kthr[i]) tau -= a0[i];
        }
      }
      taus.push_back(tau);
    }
  } else {
    // pass 1: exposure frequencies from the very replicate stream we will
    // re-play below, so flags and probabilities are consistent
    auto mc = exposure_probability_mc(g, cl, p, spec, replicates, seed);
    std::vector<double> a1(n), a0(n);
    for (int i = 0; i < n; ++i) {
      a1[i] = mc.pi1[i] > 0 ? po.y1[i] / mc.pi1[i] / n : 0.0;
      a0[i] = mc.pi0[i] > 0 ? po.y0[i] / mc.pi0[i] / n : 0.0;
    }
    ExposureEvaluator ev(g, spec);
    std::vector<char> coins(nc), z(n);
    for (long long r = 0; r < replicates; ++r) {
      SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      for (int c = 0; c < nc; ++c) coins[c] = rng.next_bernoulli(p);
      for (int v = 0; v < n; ++v) z[v] = coins[cl.assignment[v]];
      auto e1 = ev.indicators(z, Arm::Treatment);
      auto e0 = ev.indicators(z, Arm::Control);
      double tau = 0.0;
      for (int i = 0; i < n; ++i) {
        if (e1[i]) tau += a1[i];
        else if (e0[i]) tau -= a0[i];
      }
      taus.push_back(tau);
    }
  }
  return detail::summarize_replicates(taus);
}

}  // namespace gcr
