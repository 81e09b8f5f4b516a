#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gcr/exposure.hpp"
#include "gcr/generators.hpp"
#include "oracles.hpp"

using namespace gcr;
using Catch::Matchers::WithinAbs;

namespace {

Assignment bits_to_assignment(const Clustering& cl, const std::string& bits) {
  std::vector<char> coins;
  for (char b : bits) coins.push_back(b == '1');
  return Assignment::from_coins(cl, std::move(coins));
}

}  // namespace

TEST_CASE("spec grammar") {
  CHECK(ExposureSpec::parse("full").kind == ExposureKind::FullNeighborhood);
  CHECK(ExposureSpec::parse("abs:3").k == 3);
  CHECK(ExposureSpec::parse("frac:0.5").q == 0.5);
  CHECK(ExposureSpec::parse("component").kind == ExposureKind::Component);
  CHECK(ExposureSpec::parse("kcore:2").kind == ExposureKind::KCore);
  CHECK(ExposureSpec::parse("fqcore:0.75").kind == ExposureKind::FractionalQCore);
  CHECK_THROWS(ExposureSpec::parse("abs:0"));
  CHECK_THROWS(ExposureSpec::parse("frac:1.5"));
  CHECK_THROWS(ExposureSpec::parse("bogus"));
}

TEST_CASE("exposure indicators") {
  Graph g = gen_cycle(6);
  Clustering cl = singleton_clustering(g);

  SECTION("all-ones assignment exposes everyone to treatment") {
    Assignment a = bits_to_assignment(cl, "111111");
    for (auto kind : {"full", "abs:2", "frac:0.5", "component", "kcore:2",
                      "fqcore:1"})
      for (int i = 0; i < 6; ++i)
        CHECK(is_exposed(g, cl, a, ExposureSpec::parse(kind), Arm::Treatment, i));
  }
  SECTION("full neighborhood, z = 111000") {
    Assignment a = bits_to_assignment(cl, "111000");
    ExposureSpec full = ExposureSpec::parse("full");
    CHECK(is_exposed(g, cl, a, full, Arm::Treatment, 1));
    CHECK_FALSE(is_exposed(g, cl, a, full, Arm::Treatment, 2));
    CHECK(is_exposed(g, cl, a, full, Arm::Control, 4));
  }
  SECTION("fractional q=0.5, z = 110110") {
    Assignment a = bits_to_assignment(cl, "110110");
    CHECK(is_exposed(g, cl, a, ExposureSpec::parse("frac:0.5"), Arm::Treatment, 0));
  }
  SECTION("core exposure peels weakly connected treated vertices") {
    // 0-1-2 treated path inside the 6-cycle: endpoints have one treated
    // neighbor, so the 2-core of the treated subgraph is empty
    Assignment a = bits_to_assignment(cl, "111000");
    ExposureSpec kcore = ExposureSpec::parse("kcore:2");
    for (int i = 0; i < 6; ++i)
      CHECK_FALSE(is_exposed(g, cl, a, kcore, Arm::Treatment, i));
    // but each interior vertex still has abs:2 neighborhood exposure
    CHECK(is_exposed(g, cl, a, ExposureSpec::parse("abs:2"), Arm::Treatment, 1));
  }
  SECTION("component exposure needs the whole component") {
    Graph h = Graph::from_edges(5, {{0, 1}, {1, 2}, {3, 4}});
    Clustering hcl = singleton_clustering(h);
    Assignment a = bits_to_assignment(hcl, "11111");
    a = bits_to_assignment(hcl, "11100");
    ExposureSpec comp = ExposureSpec::parse("component");
    CHECK(is_exposed(h, hcl, a, comp, Arm::Treatment, 0));
    CHECK(is_exposed(h, hcl, a, comp, Arm::Control, 3));
    a = bits_to_assignment(hcl, "11000");
    CHECK_FALSE(is_exposed(h, hcl, a, comp, Arm::Treatment, 0));
  }
}

TEST_CASE("weighted Poisson-binomial tail") {
  SECTION("two unit coins") {
    std::vector<int> w{1, 1};
    CHECK_THAT(dp_tail(w, 0.5, 1), WithinAbs(0.75, 1e-15));
    CHECK_THAT(dp_tail(w, 0.5, 2), WithinAbs(0.25, 1e-15));
  }
  SECTION("threshold <= 0 is certain") {
    std::vector<int> w{3, 5};
    CHECK(dp_tail(w, 0.2, 0) == 1.0);
    CHECK(dp_tail(w, 0.2, -4) == 1.0);
  }
  SECTION("single weighted coin") {
    std::vector<int> w{2};
    CHECK_THAT(dp_tail(w, 0.3, 2), WithinAbs(0.3, 1e-15));
    CHECK_THAT(dp_tail(w, 0.3, 3), WithinAbs(0.0, 1e-15));
  }
  SECTION("matches direct enumeration on random weight vectors") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
      int s = 1 + static_cast<int>(rng.next() % 6);
      std::vector<int> w(s);
      int total = 0;
      for (int& x : w) {
        x = 1 + static_cast<int>(rng.next() % 4);
        total += x;
      }
      double p = 0.1 + 0.8 * rng.next_u01();
      for (int t = 0; t <= total + 1; ++t) {
        double expect = 0.0;
        for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
          int sum = 0;
          double prob = 1.0;
          for (int j = 0; j < s; ++j) {
            if ((mask >> j) & 1) { sum += w[j]; prob *= p; }
            else prob *= 1.0 - p;
          }
          if (sum >= t) expect += prob;
        }
        CHECK_THAT(dp_tail(w, p, t), WithinAbs(expect, 1e-13));
      }
    }
  }
}

TEST_CASE("exact exposure probabilities") {
  SECTION("singleton full exposure: p^(d+1)") {
    Graph g = gen_cycle(8);
    ExposureWeights ew = exposure_weights(g, singleton_clustering(g));
    for (double p : {0.3, 0.5, 0.7}) {
      double pi1 = exposure_probability_exact(ew, 0, p, ExposureSpec{}, Arm::Treatment);
      double pi0 = exposure_probability_exact(ew, 0, p, ExposureSpec{}, Arm::Control);
      CHECK_THAT(pi1, WithinAbs(std::pow(p, 3), 1e-15));
      CHECK_THAT(pi0, WithinAbs(std::pow(1 - p, 3), 1e-15));
    }
  }
  SECTION("cluster randomization full exposure: p^|S_i|") {
    Graph g = gen_cycle_power(20, 2);
    Clustering cl = cycle_block_clustering(20, 3);
    ExposureWeights ew = exposure_weights(g, cl);
    for (int i = 0; i < 20; ++i) {
      double pi1 = exposure_probability_exact(ew, i, 0.4, ExposureSpec{}, Arm::Treatment);
      CHECK_THAT(pi1, WithinAbs(std::pow(0.4, ew.s(i)), 1e-14));
    }
  }
  SECTION("one-cluster clustering: any neighborhood spec gives p") {
    Graph g = gen_cycle(6);
    Clustering cl = Clustering::from_assignment(std::vector<int>(6, 0));
    ExposureWeights ew = exposure_weights(g, cl);
    for (auto spec : {"full", "abs:1", "frac:0.5"})
      CHECK_THAT(exposure_probability_exact(ew, 2, 0.37,
                                            ExposureSpec::parse(spec),
                                            Arm::Treatment),
                 WithinAbs(0.37, 1e-15));
  }
  SECTION("5-cycle blocks, vertex 2, abs:1 matches enumeration") {
    Graph g = gen_cycle(5);
    Clustering cl = Clustering::from_assignment({0, 0, 1, 1, 2});
    ExposureWeights ew = exposure_weights(g, cl);
    ExposureSpec spec = ExposureSpec::parse("abs:1");
    double expect = oracle::enum_exposure_probability(g, cl, 0.5, spec,
                                                      Arm::Treatment, 2);
    CHECK_THAT(exposure_probability_exact(ew, 2, 0.5, spec, Arm::Treatment),
               WithinAbs(expect, 1e-15));
  }
  SECTION("matches enumeration across random fixtures, specs, arms, p") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      auto fx = oracle::random_fixture(9, 5, seed);
      ExposureWeights ew = exposure_weights(fx.g, fx.cl);
      std::vector<ExposureSpec> specs{ExposureSpec::parse("full")};
      for (int k = 1; k <= 4; ++k)
        specs.push_back(ExposureSpec::parse("abs:" + std::to_string(k)));
      for (double q : {0.25, 0.5, 0.75, 1.0}) {
        ExposureSpec s;
        s.kind = ExposureKind::FractionalQ;
        s.q = q;
        specs.push_back(s);
      }
      for (double p : {0.3, 0.7})
        for (const auto& spec : specs)
          for (Arm arm : {Arm::Treatment, Arm::Control})
            for (int i = 0; i < fx.g.num_vertices(); i += 2) {
              double expect =
                  oracle::enum_exposure_probability(fx.g, fx.cl, p, spec, arm, i);
              CHECK_THAT(exposure_probability_exact(ew, i, p, spec, arm),
                         WithinAbs(expect, 1e-12));
            }
    }
  }
  SECTION("treatment/control symmetry in p") {
    auto fx = oracle::random_fixture(10, 4, 77);
    ExposureWeights ew = exposure_weights(fx.g, fx.cl);
    ExposureSpec spec = ExposureSpec::parse("abs:2");
    for (int i = 0; i < 10; ++i)
      CHECK_THAT(exposure_probability_exact(ew, i, 0.3, spec, Arm::Control),
                 WithinAbs(exposure_probability_exact(ew, i, 0.7, spec,
                                                      Arm::Treatment),
                           1e-14));
  }
  SECTION("degenerate p rejected") {
    Graph g = gen_cycle(4);
    ExposureWeights ew = exposure_weights(g, singleton_clustering(g));
    CHECK_THROWS(exposure_probability_exact(ew, 0, 0.0, ExposureSpec{}, Arm::Treatment));
    CHECK_THROWS(exposure_probability_exact(ew, 0, 1.0, ExposureSpec{}, Arm::Treatment));
  }
}

TEST_CASE("per-threshold exposure distribution") {
  Graph g = gen_cycle_power(18, 2);
  SECTION("k=0 entry is the arm probability; k=d is full exposure") {
    Clustering cl = cycle_block_clustering(18, 3);
    ExposureWeights ew = exposure_weights(g, cl);
    auto dist = exposure_distribution(ew, 4, 0.4, Arm::Treatment);
    REQUIRE(dist.size() == 5);
    CHECK_THAT(dist[0], WithinAbs(0.4, 1e-15));
    CHECK_THAT(dist[4],
               WithinAbs(exposure_probability_exact(ew, 4, 0.4, ExposureSpec{},
                                                    Arm::Treatment),
                         1e-14));
    for (std::size_t k = 1; k < dist.size(); ++k) CHECK(dist[k] <= dist[k - 1]);
  }
  SECTION("entries match per-threshold exact probabilities") {
    auto fx = oracle::random_fixture(10, 5, 13);
    ExposureWeights ew = exposure_weights(fx.g, fx.cl);
    for (int i = 0; i < 10; ++i) {
      for (Arm arm : {Arm::Treatment, Arm::Control}) {
        auto dist = exposure_distribution(ew, i, 0.45, arm);
        for (int k = 1; k <= fx.g.degree(i); ++k) {
          ExposureSpec s;
          s.kind = ExposureKind::AbsoluteK;
          s.k = k;
          CHECK_THAT(dist[k],
                     WithinAbs(exposure_probability_exact(ew, i, 0.45, s, arm),
                               1e-14));
        }
      }
    }
  }
  SECTION("block clustering concentrates mass at the extremes") {
    // against singleton randomization, blocks push probability toward
    // 0 or d treated neighbors
    Clustering blocks = cycle_block_clustering(18, 5);
    Clustering singles = singleton_clustering(g);
    auto db = exposure_distribution(exposure_weights(g, blocks), 7, 0.5,
                                    Arm::Treatment);
    auto ds = exposure_distribution(exposure_weights(g, singles), 7, 0.5,
                                    Arm::Treatment);
    CHECK(db[4] > ds[4]);  // full exposure much likelier under blocks
    Clustering cl3 = cycle_block_clustering(18, 3);
    auto d3 = exposure_distribution(exposure_weights(g, cl3), 7, 0.5,
                                    Arm::Treatment);
    double expect = oracle::enum_exposure_probability(
        g, cl3, 0.5, ExposureSpec::parse("abs:2"), Arm::Treatment, 7);
    CHECK_THAT(d3[2], WithinAbs(expect, 1e-13));
  }
}

TEST_CASE("joint exposure probabilities") {
  SECTION("disjoint cluster sets factorize") {
    Graph g = gen_cycle(12);
    Clustering cl = singleton_clustering(g);
    ExposureWeights ew = exposure_weights(g, cl);
    ExposureSpec full;
    auto v = joint_exposure_probability_exact(ew, 0, 6, 0.5, full,
                                              Arm::Treatment, full, Arm::Control);
    REQUIRE(v.has_value());
    CHECK_THAT(*v, WithinAbs(std::pow(0.5, 3) * std::pow(0.5, 3), 1e-15));
  }
  SECTION("cycle singleton joints at p = 1/2: 1/16 and 1/32") {
    Graph g = gen_cycle(100);
    ExposureWeights ew = exposure_weights(g, singleton_clustering(g));
    ExposureSpec full;
    auto adjacent = joint_exposure_probability_exact(
        ew, 10, 11, 0.5, full, Arm::Treatment, full, Arm::Treatment);
    auto two_apart = joint_exposure_probability_exact(
        ew, 10, 12, 0.5, full, Arm::Treatment, full, Arm::Treatment);
    CHECK_THAT(*adjacent, WithinAbs(1.0 / 16, 1e-15));
    CHECK_THAT(*two_apart, WithinAbs(1.0 / 32, 1e-15));
  }
  SECTION("matches enumeration across fixtures and arm combinations") {
    for (std::uint64_t seed = 30; seed <= 36; ++seed) {
      auto fx = oracle::random_fixture(8, 4, seed);
      ExposureWeights ew = exposure_weights(fx.g, fx.cl);
      std::vector<ExposureSpec> specs{
          ExposureSpec::parse("full"), ExposureSpec::parse("abs:2"),
          ExposureSpec::parse("frac:0.5")};
      for (const auto& sx : specs)
        for (const auto& sy : specs)
          for (Arm ax : {Arm::Treatment, Arm::Control})
            for (Arm ay : {Arm::Treatment, Arm::Control})
              for (int i = 0; i < 8; i += 3)
                for (int j = 1; j < 8; j += 3) {
                  if (i == j) continue;
                  auto got = joint_exposure_probability_exact(ew, i, j, 0.4,
                                                              sx, ax, sy, ay);
                  REQUIRE(got.has_value());
                  double expect = oracle::enum_joint_probability(
                      fx.g, fx.cl, 0.4, sx, ax, sy, ay, i, j);
                  CHECK_THAT(*got, WithinAbs(expect, 1e-12));
                }
    }
  }
  SECTION("positive association for same arm, negative across arms") {
    Graph g = gen_cycle(10);
    ExposureWeights ew = exposure_weights(g, singleton_clustering(g));
    ExposureSpec full;
    double pi1 = exposure_probability_exact(ew, 0, 0.5, full, Arm::Treatment);
    double pi0 = exposure_probability_exact(ew, 1, 0.5, full, Arm::Control);
    auto same = joint_exposure_probability_exact(ew, 0, 1, 0.5, full,
                                                 Arm::Treatment, full,
                                                 Arm::Treatment);
    auto cross = joint_exposure_probability_exact(ew, 0, 1, 0.5, full,
                                                  Arm::Treatment, full,
                                                  Arm::Control);
    CHECK(*same > pi1 * pi1);
    CHECK(*cross <= pi1 * pi0);
    CHECK(*same <= pi1);
  }
  SECTION("shared-cluster gate returns nullopt") {
    Graph g = gen_cycle_power(60, 12);
    ExposureWeights ew = exposure_weights(g, singleton_clustering(g));
    ExposureSpec full;
    auto v = joint_exposure_probability_exact(ew, 0, 1, 0.5, full,
                                              Arm::Treatment, full,
                                              Arm::Treatment, /*max_shared=*/8);
    CHECK_FALSE(v.has_value());
  }
}

TEST_CASE("nesting of exposure conditions") {
  auto fx = oracle::random_fixture(10, 4, 55);
  ExposureWeights ew = exposure_weights(fx.g, fx.cl);
  SECTION("probability non-increasing in k and q") {
    for (int i = 0; i < 10; ++i) {
      double prev = 1.0;
      for (int k = 1; k <= 5; ++k) {
        ExposureSpec s;
        s.kind = ExposureKind::AbsoluteK;
        s.k = k;
        double cur = exposure_probability_exact(ew, i, 0.5, s, Arm::Treatment);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
      }
      prev = 1.0;
      for (double q : {0.25, 0.5, 0.75, 1.0}) {
        ExposureSpec s;
        s.kind = ExposureKind::FractionalQ;
        s.q = q;
        double cur = exposure_probability_exact(ew, i, 0.5, s, Arm::Treatment);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
      }
    }
  }
}

TEST_CASE("Monte Carlo probabilities") {
  Graph g = gen_cycle_power(20, 2);
  Clustering cl = cycle_block_clustering(20, 4);
  SECTION("agrees with the exact DP within 4 standard errors") {
    ExposureSpec spec = ExposureSpec::parse("abs:2");
    auto mc = exposure_probability_mc(g, cl, 0.5, spec, 100000, 42);
    ExposureWeights ew = exposure_weights(g, cl);
    for (int i = 0; i < 20; ++i) {
      double exact1 = exposure_probability_exact(ew, i, 0.5, spec, Arm::Treatment);
      double exact0 = exposure_probability_exact(ew, i, 0.5, spec, Arm::Control);
      CHECK(std::abs(mc.pi1[i] - exact1) <= 4 * mc.stderr1[i] + 1e-9);
      CHECK(std::abs(mc.pi0[i] - exact0) <= 4 * mc.stderr0[i] + 1e-9);
    }
  }
  SECTION("core probability bounded by neighborhood probability") {
    auto core = exposure_probability_mc(g, cl, 0.5, ExposureSpec::parse("kcore:2"),
                                        20000, 7);
    auto nbhd = exposure_probability_mc(g, cl, 0.5, ExposureSpec::parse("abs:2"),
                                        20000, 7);
    // identical replicate streams make the bound hold draw by draw
    for (int i = 0; i < 20; ++i) CHECK(core.pi1[i] <= nbhd.pi1[i] + 1e-12);
  }
  SECTION("fractional q-core at q=1 equals component exposure") {
    Graph h = Graph::from_edges(9, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {5, 6},
                                    {6, 7}, {7, 8}, {8, 5}});
    Clustering hcl = cycle_block_clustering(9, 2);
    auto a = exposure_probability_mc(h, hcl, 0.4, ExposureSpec::parse("fqcore:1"),
                                     5000, 3);
    auto b = exposure_probability_mc(h, hcl, 0.4, ExposureSpec::parse("component"),
                                     5000, 3);
    for (int i = 0; i < 9; ++i) {
      CHECK(a.pi1[i] == b.pi1[i]);
      CHECK(a.pi0[i] == b.pi0[i]);
    }
  }
  SECTION("deterministic given seed") {
    auto a = exposure_probability_mc(g, cl, 0.5, ExposureSpec{}, 2000, 5);
    auto b = exposure_probability_mc(g, cl, 0.5, ExposureSpec{}, 2000, 5);
    CHECK(a.pi1 == b.pi1);
    CHECK(a.pi0 == b.pi0);
  }
}

TEST_CASE("probability tables") {
  Graph g = gen_cycle(10);
  Clustering cl = cycle_block_clustering(10, 2);
  ExposureWeights ew = exposure_weights(g, cl);
  SECTION("exact table has joints for every dependent pair") {
    ProbabilityTable pt = build_probability_table(ew, 0.5, ExposureSpec{});
    CHECK(pt.method == ProbMethod::Exact);
    for (auto [i, j] : dependent_pairs(ew)) {
      for (int x : {0, 1})
        for (int y : {0, 1}) CHECK(pt.joint.count({i, j, x, y}) == 1);
    }
    // joint never exceeds either marginal
    for (const auto& [key, v] : pt.joint) {
      double pi = key.x ? pt.pi1[key.i] : pt.pi0[key.i];
      double pj = key.y ? pt.pi1[key.j] : pt.pi0[key.j];
      CHECK(v <= std::min(pi, pj) + 1e-12);
    }
  }
}
