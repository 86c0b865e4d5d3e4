#include <gtest/gtest.h>

#include <cmath>

#include "shapcf/error.hpp"
#include "shapcf/shapley.hpp"
#include "test_support.hpp"

namespace shapcf {
namespace {

using testing::AdditiveGame;
using testing::make_partition;

TEST(ShapleyExact, AdditiveTwoOwners) {
  const AdditiveGame g{{3.0, 1.0}, {{0}, {1}}};
  const auto p = g.partition();
  const auto u = g.oracle();
  EXPECT_DOUBLE_EQ(shapley_exact(p, u, owner(0)), 3.0);
  EXPECT_DOUBLE_EQ(shapley_exact(p, u, owner(1)), 1.0);
  EXPECT_DOUBLE_EQ(shapley_permutation_exact(p, u, owner(0)), 3.0);
}

TEST(ShapleyExact, NullPlayer) {
  const auto p = make_partition(3, {{0, 1}, {}, {2}});
  const auto u = testing::additive_oracle({2.0, 1.0, 4.0});
  EXPECT_EQ(shapley_exact(p, u, owner(1)), 0.0);
}

TEST(ShapleyExact, SetCoverMatchesPermutationOracle) {
  // One subset per owner: S1 = {e1}, S2 = {e2}, S3 = {e1, e2}.
  const std::vector<std::vector<std::uint32_t>> subsets{{0}, {1}, {0, 1}};
  const std::vector<std::vector<std::uint32_t>> owners{{0}, {1}, {2}};
  const auto p = make_partition(3, owners);
  const UtilityOracle u(std::make_shared<SetCoverUtility>(SetCoverGame{2, subsets}));
  const auto expected = testing::permutation_shapley(owners, 3, testing::raw_set_cover(2, subsets));
  const auto all = shapley_exact_all(p, u);
  for (std::uint32_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(shapley_exact(p, u, owner(i)), expected[i], 1e-12);
    EXPECT_NEAR(all[i], expected[i], 1e-12);
  }
}

TEST(ShapleyExact, OverlappingOwnersMatchPermutationOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = rng.uniform_int(2, 6);
    const std::size_t universe = 12;
    std::vector<double> w(universe);
    for (double& x : w) x = rng.uniform01() * 4;
    std::vector<std::vector<std::uint32_t>> owners(n);
    for (auto& o : owners) {
      for (std::uint32_t e = 0; e < universe; ++e) {
        if (rng.uniform01() < 0.3) o.push_back(e);
      }
    }
    const auto p = make_partition(universe, owners);
    const auto u = testing::additive_oracle(w);
    const auto expected = testing::permutation_shapley(owners, universe, testing::raw_additive(w));
    for (std::uint32_t i = 0; i < n; ++i) {
      EXPECT_NEAR(shapley_exact(p, u, owner(i)), expected[i], 1e-12);
    }
  }
}

TEST(ShapleyExact, TooManyOwners) {
  std::vector<std::vector<std::uint32_t>> owners(13);
  for (std::uint32_t i = 0; i < 13; ++i) owners[i] = {i};
  const auto p = make_partition(13, owners);
  const auto u = testing::additive_oracle(std::vector<double>(13, 1.0));
  try {
    shapley_exact(p, u, owner(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyOwners);
  }
  EXPECT_NEAR(shapley_exact(p, u, owner(0), 13), 1.0, 1e-12);
}

TEST(DiffShapley, IdentityOnRandomGames) {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.uniform_int(3, 6);
    const auto g = testing::random_additive_game(n, 3, rng);
    // Mix in a set-cover game over the same owners every other trial.
    const auto p = g.partition();
    std::optional<UtilityOracle> u;
    if (trial % 2 == 0) {
      u = g.oracle();
    } else {
      SetCoverGame sc;
      sc.elements = 4;
      for (std::size_t j = 0; j < g.weights.size(); ++j) {
        std::vector<std::uint32_t> s;
        for (std::uint32_t e = 0; e < 4; ++e) {
          if (rng.uniform01() < 0.5) s.push_back(e);
        }
        sc.subsets.push_back(s);
      }
      sc.subsets.back() = {0, 1, 2, 3};
      u.emplace(std::make_shared<SetCoverUtility>(sc));
    }
    const OwnerId a = owner(0);
    const OwnerId b = owner(static_cast<std::uint32_t>(rng.uniform_int(1, n - 1)));
    const double lhs = diff_shapley_exact(p, *u, a, b);
    EXPECT_NEAR(lhs, shapley_exact(p, *u, a) - shapley_exact(p, *u, b), 1e-12);
    double sum = 0.0;
    for (const auto& t : diff_shapley_terms(p, *u, a, b)) {
      EXPECT_FALSE(t.coalition.contains(a));
      EXPECT_FALSE(t.coalition.contains(b));
      sum += t.value;
    }
    EXPECT_NEAR(sum, lhs, 1e-12);
    EXPECT_EQ(diff_shapley_exact(p, *u, a, a), 0.0);
  }
}

TEST(DiffShapley, AdditiveIsWeightGap) {
  const AdditiveGame g{{5, 1, 1, 2, 4}, {{0, 1, 2}, {3}, {4}}};
  EXPECT_NEAR(diff_shapley_exact(g.partition(), g.oracle(), owner(0), owner(1)), 5.0, 1e-12);
  EXPECT_NEAR(diff_shapley_exact(g.partition(), g.oracle(), owner(1), owner(2)), -2.0, 1e-12);
}

TEST(DiffShapleyMc, PooledMeanIsUnbiased) {
  Rng game_rng(31);
  const auto g = testing::random_additive_game(5, 4, game_rng);
  const auto p = g.partition();
  const auto u = g.oracle();
  const double exact = g.owner_weight(0) - g.owner_weight(1);
  SamplingOptions opts;
  opts.max_samples = 2000;
  opts.min_samples = 2000;
  Estimate pooled;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const Estimate e = diff_shapley_mc(p, u, owner(0), owner(1), opts, rng);
    EXPECT_EQ(e.count(), 2000U);
    pooled.merge(e);
  }
  const double se = std::sqrt(pooled.variance() / static_cast<double>(pooled.count()));
  EXPECT_LE(std::abs(pooled.mean() - exact), 3.0 * se + 1e-12);
}

TEST(DiffShapleyMc, SameOwnerHasZeroWidth) {
  const AdditiveGame g{{5, 1, 2}, {{0, 1}, {2}}};
  SamplingOptions opts;
  opts.max_samples = 300;
  Rng rng(1);
  const Estimate e = diff_shapley_mc(g.partition(), g.oracle(), owner(0), owner(0), opts, rng);
  EXPECT_EQ(e.mean(), 0.0);
  EXPECT_EQ(e.half_width(), 0.0);
  EXPECT_GE(e.count(), 2U);
}

TEST(DiffShapleyMc, SampleMatchesDefinition) {
  const AdditiveGame g{{5, 1, 2, 3}, {{0, 1}, {2}, {3}}};
  const auto p = g.partition();
  const auto u = g.oracle();
  // Order (C, A, B): P = {C}; n/2 * [U(C+A) - U(C+B)] / (n - 1 - 1).
  const PermutationSample perm({owner(2), owner(0), owner(1)});
  EXPECT_DOUBLE_EQ(diff_shapley_sample(p, u, owner(0), owner(1), perm), 1.5 * (9.0 - 5.0) / 1.0);
  // Order (A, C, B): P = {}; 1.5 * [6 - 2] / 2.
  const PermutationSample first({owner(0), owner(2), owner(1)});
  EXPECT_DOUBLE_EQ(diff_shapley_sample(p, u, owner(0), owner(1), first), 3.0);
}

TEST(DiffShapleyMc, TargetHalfWidthStopsEarly) {
  const AdditiveGame g{{5, 1, 2, 3}, {{0, 1}, {2}, {3}}};
  SamplingOptions opts;
  opts.max_samples = 100000;
  opts.target_half_width = 0.5;
  Rng rng(2);
  const Estimate e = diff_shapley_mc(g.partition(), g.oracle(), owner(0), owner(1), opts, rng);
  EXPECT_LE(e.half_width(), 0.5);
  EXPECT_LT(e.count(), 100000U);
  EXPECT_DOUBLE_EQ(default_target_half_width(0.3), 0.01);
  EXPECT_DOUBLE_EQ(default_target_half_width(-40.0), 0.4);
}

TEST(DiffShapleyMc, CancelledStopsSampling) {
  const AdditiveGame g{{5, 1, 2, 3}, {{0, 1}, {2}, {3}}};
  SamplingOptions opts;
  opts.max_samples = 100000;
  opts.batch = 10;
  opts.cancelled = [] { return true; };
  Rng rng(2);
  const Estimate e = diff_shapley_mc(g.partition(), g.oracle(), owner(0), owner(1), opts, rng);
  EXPECT_LE(e.count(), 10U);
}

TEST(DiffShapleyMc, ConfidenceIntervalCoverage) {
  Rng game_rng(41);
  const auto g = testing::random_additive_game(5, 3, game_rng);
  const double exact = g.owner_weight(0) - g.owner_weight(2);
  SamplingOptions opts;
  opts.max_samples = 500;
  opts.min_samples = 500;
  int covered = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(1000 + static_cast<std::uint64_t>(seed));
    const Estimate e = diff_shapley_mc(g.partition(), g.oracle(), owner(0), owner(2), opts, rng);
    if (e.lower() <= exact && exact <= e.upper()) ++covered;
  }
  EXPECT_GE(covered, 90);
}

TEST(ShapleyMc, ConvergesToExact) {
  Rng game_rng(43);
  const auto g = testing::random_additive_game(4, 3, game_rng);
  SamplingOptions opts;
  opts.max_samples = 4000;
  opts.min_samples = 4000;
  for (std::uint32_t i = 0; i < 4; ++i) {
    Rng rng(i);
    const Estimate e = shapley_mc(g.partition(), g.oracle(), owner(i), opts, rng);
    // Additive marginals are constant, so the estimate is exact.
    EXPECT_NEAR(e.mean(), g.owner_weight(i), 1e-9);
  }
}

FlipCheck flip_on_gap(double wa, double wb, std::uint64_t seed, std::size_t budget = 4000) {
  // A and B plus two unit-weight bystanders.
  const AdditiveGame g{{wa, wb, 1.0, 1.0}, {{0}, {1}, {2}, {3}}};
  SamplingOptions opts;
  opts.max_samples = budget;
  Rng rng(seed);
  return is_flipped(g.partition(), g.oracle(), owner(0), owner(1), opts, rng);
}

TEST(IsFlipped, Examples) {
  EXPECT_EQ(flip_on_gap(1.0, 3.0, 1).outcome, FlipOutcome::kFlipped);
  EXPECT_EQ(flip_on_gap(3.0, 1.0, 1).outcome, FlipOutcome::kNotFlipped);
  const FlipCheck tie = flip_on_gap(2.0, 2.0, 1, 1000);
  EXPECT_EQ(tie.outcome, FlipOutcome::kUndecided);
  EXPECT_EQ(tie.estimate.count(), 1000U);
  EXPECT_TRUE(flip_on_gap(1.0, 3.0, 1).flipped());
  EXPECT_STREQ(flip_outcome_name(FlipOutcome::kUndecided), "undecided");
}

TEST(IsFlipped, NoisyGapDecidesCorrectly) {
  const AdditiveGame g{{0.5, 0.5, 3.0, 7.0, 1.0}, {{0, 2}, {1, 4}, {3}}};
  // psi(A) - psi(B) = 3.5 - 1.5 = 2 but samples vary with the prefix.
  SamplingOptions opts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    EXPECT_EQ(is_flipped(g.partition(), g.oracle(), owner(0), owner(1), opts, rng).outcome,
              FlipOutcome::kNotFlipped);
    EXPECT_EQ(is_flipped(g.partition(), g.oracle(), owner(1), owner(0), opts, rng).outcome,
              FlipOutcome::kFlipped);
  }
}

TEST(Axioms, EfficiencySymmetryNullPlayer) {
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = rng.uniform_int(2, 6);
    auto g = testing::random_additive_game(n, 3, rng);
    // Owner 0 duplicates owner 1's weights on fresh entries (symmetry) when
    // n >= 3, and the last owner is empty (null player).
    if (n >= 3) {
      g.owners[0].clear();
      for (std::uint32_t id : g.owners[1]) {
        g.owners[0].push_back(static_cast<std::uint32_t>(g.weights.size()));
        g.weights.push_back(g.weights[id]);
      }
      g.owners[n - 1].clear();
    }
    const auto p = g.partition();
    const auto u = g.oracle();
    const auto psi = shapley_exact_all(p, u);
    double total = 0.0;
    for (double v : psi) total += v;
    EXPECT_NEAR(total, u(p.all_entries()), 1e-9);
    if (n >= 3) {
      EXPECT_NEAR(psi[0], psi[1], 1e-12);
      EXPECT_EQ(psi[n - 1], 0.0);
    }
  }
}

TEST(Estimate, HalfWidthFormulaAndScaling) {
  Estimate e(0.95);
  EXPECT_TRUE(std::isinf(e.half_width()));
  e.add(1.0);
  EXPECT_TRUE(std::isinf(e.half_width()));
  Rng rng(3);
  Estimate small(0.95);
  Estimate large(0.95);
  for (int i = 0; i < 1000; ++i) small.add(rng.normal(0, 1));
  for (int i = 0; i < 4000; ++i) large.add(rng.normal(0, 1));
  EXPECT_NEAR(large.half_width() / small.half_width(), 0.5, 0.1);
  EXPECT_NEAR(z_score(0.95), 1.959963984540054, 1e-12);
  const double expected =
      z_score(0.95) * std::sqrt(large.m2() / 4000.0) / std::sqrt(4000.0);
  EXPECT_DOUBLE_EQ(large.half_width(), expected);
}

TEST(Estimate, MergeIsOrderIndependent) {
  Rng rng(4);
  std::vector<Estimate> parts(5);
  Estimate all;
  for (auto& part : parts) {
    for (int i = 0; i < 200; ++i) {
      const double v = rng.normal(3.0, 2.0);
      part.add(v);
      all.add(v);
    }
  }
  Estimate forward;
  for (const auto& part : parts) forward.merge(part);
  Estimate backward;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward.merge(*it);
  Estimate nested = parts[0];
  Estimate tail = parts[3];
  tail.merge(parts[4]);
  Estimate mid = parts[1];
  mid.merge(parts[2]);
  mid.merge(tail);
  nested.merge(mid);
  for (const Estimate* e : {&forward, &backward, &nested}) {
    EXPECT_EQ(e->count(), all.count());
    EXPECT_NEAR(e->mean(), all.mean(), 1e-9 * std::abs(all.mean()));
    EXPECT_NEAR(e->m2(), all.m2(), 1e-9 * all.m2());
  }
  Estimate empty;
  Estimate copy = all;
  copy.merge(empty);
  EXPECT_EQ(copy.mean(), all.mean());
}

}  // namespace
}  // namespace shapcf
