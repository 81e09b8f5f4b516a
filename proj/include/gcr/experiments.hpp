#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcr/clustering.hpp"
#include "gcr/estimator.hpp"
#include "gcr/generators.hpp"
#include "gcr/rng.hpp"

namespace gcr {

/// Conventional asymptotic coefficient for the cycle with contiguous blocks
/// of c vertices, full exposure, p = 1/2, y1 = Ybar, y0 = 0: 15/2 for c = 1
/// and c/2 + 2 + 4/c for c >= 2. The realized variance of the estimator is
/// exactly twice this coefficient times Ybar^2/n (the coefficient family is
/// reported at half scale; exhaustive enumeration on small cycles pins the
/// factor). Shape properties, including the minimizer c = 3, are unaffected.
inline double asymptotic_cycle_variance(int c) {
  if (c < 1) throw std::invalid_argument("c must be >= 1");
  if (c == 1) return 15.0 / 2.0;
  return c / 2.0 + 2.0 + 4.0 / c;
}

/// Exponential-in-degree lower bound on the HT variance under singleton
/// (vertex-level) randomization with full exposure, responses >= Y_m > 0.
inline double vertex_randomization_variance_lower_bound(int d, double p,
                                                        double y_m, int n) {
  detail::check_p(p);
  return y_m * y_m / n *
         (std::pow(p, -(d + 1)) + std::pow(1.0 - p, -(d + 1)) - 2.0);
}

/// Linear-in-degree upper bound on the HT variance under 3-net cluster
/// randomization of a restricted-growth graph with growth constant kappa:
/// per-arm bound (at p and 1-p) plus the covariance bound.
inline double net3_variance_upper_bound(double kappa, int d, double p,
                                        double y_M, int n) {
  detail::check_p(p);
  if (kappa < 1.0) throw std::invalid_argument("kappa must be >= 1");
  double k3 = std::pow(kappa, 3.0);
  double k5 = std::pow(kappa, 5.0);
  auto arm = [&](double px) {
    return (std::pow(px, -k3) - 1.0) +
           k5 * (d + 1) * (std::pow(px, -2.0 * k3 - 1.0) - 1.0);
  };
  double cov = 2.0 * (k5 * (d + 1) + 1.0);
  return y_M * y_M / n * (arm(p) + arm(1.0 - p) + cov);
}

/// Variance bound for contiguous blocks of c = d+1 on the d-regular cycle
/// power: Y_M^2 (p^-2 - 1)(3d + 2) / n.
inline double cycle_block_bound_check(int d, double p, double y_M, int n) {
  detail::check_p(p);
  return y_M * y_M * (1.0 / (p * p) - 1.0) * (3.0 * d + 2.0) / n;
}

// --- sweep harness -----------------------------------------------------------

struct SweepConfig {
  int n = 2000;
  std::vector<int> k_list{1};
  std::vector<int> c_list{1, 2, 3, 4, 5};
  double p = 0.5;
  ExposureSpec spec{};  // full neighborhood by default
  double y1 = 1.0, y0 = 0.0;
  long long replicates = 100000;
  std::uint64_t seed = 0;
};

struct SweepRow {
  int k, c, n;
  double p;
  long long replicates;
  double var, var_stderr, mean;
  std::uint64_t seed;  // the derived per-cell seed
};

/// Runs variance_mc on cycle powers for every (k, c) cell with contiguous
/// block clustering. Each cell draws from a seed derived from its grid
/// position, so the result is independent of execution order.
inline std::vector<SweepRow> cycle_power_sweep(const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  for (int k : cfg.k_list) {
    Graph g = gen_cycle_power(cfg.n, k);
    PotentialOutcomes po = PotentialOutcomes::uniform(cfg.n, cfg.y1, cfg.y0);
    for (int c : cfg.c_list) {
      std::uint64_t cell_seed = derive_seed(
          cfg.seed, (static_cast<std::uint64_t>(k) << 32) |
                        static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)));
      Clustering cl = cycle_block_clustering(cfg.n, c);
      McVariance mv =
          variance_mc(g, cl, po, cfg.p, cfg.spec, cfg.replicates, cell_seed);
      rows.push_back({k, c, cfg.n, cfg.p, cfg.replicates, mv.variance,
                      mv.var_stderr, mv.mean, cell_seed});
    }
  }
  return rows;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            std::ostream& out) {
  out << "k,c,n,p,replicates,var,var_stderr,mean,seed\n";
  for (const auto& r : rows) {
    out << r.k << ',' << r.c << ',' << r.n << ',' << format_double(r.p) << ','
        << r.replicates << ',' << format_double(r.var) << ','
        << format_double(r.var_stderr) << ',' << format_double(r.mean) << ','
        << r.seed << "\n";
  }
}

}  // namespace gcr
