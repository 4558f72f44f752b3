#include <gtest/gtest.h>

#include <cmath>

#include "evcap/deployment.hpp"
#include "evcap/errors.hpp"
#include "evcap/formulation.hpp"
#include "support.hpp"

using namespace evcap;
using evcap::test_support::as_chain;
using evcap::test_support::hand_instance;
using evcap::test_support::mip_optimum;
using evcap::test_support::tiny_instance;

namespace {

bool has_family(const FeasibilityReport& r, ConstraintFamily f) {
  for (const auto& v : r.violations) {
    if (v.family == f) return true;
  }
  return false;
}

}  // namespace

TEST(Logit, SharesFollowAttraction) {
  auto inst = hand_instance({{1.0, 2.0}}, 2.0, 0.0, 2);
  const auto cov = coverage_sets(inst);
  const std::vector<std::uint8_t> both{1, 1};
  const auto p = logit_probabilities(inst, cov, both, 0, 0);
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
  const std::vector<std::uint8_t> second{0, 1};
  const auto q = logit_probabilities(inst, cov, second, 0, 0);
  EXPECT_DOUBLE_EQ(q[0], 0.0);
  EXPECT_DOUBLE_EQ(q[1], 1.0);
  const std::vector<std::uint8_t> none{0, 0};
  EXPECT_THROW(logit_probabilities(inst, cov, none, 0, 0), CoverageError);
}

TEST(Demand, GrowsWithNearbyOpenStations) {
  auto inst = hand_instance({{1.0, 1.0}}, 2.0, 0.5, 2);
  const auto cov = coverage_sets(inst);
  const std::vector<std::uint8_t> both{1, 1};
  const auto lambda = demand_rates(inst, cov, both, 0);
  EXPECT_NEAR(lambda[0], 1.5, 1e-12);
  EXPECT_NEAR(lambda[0] + lambda[1], 2.0 + 0.5 * 2, 1e-12);
}

TEST(Objective, SingleStationSinglePost) {
  auto inst = hand_instance({{1.0}}, 1.0, 0.0, 1);
  Deployment dep = Deployment::closed(inst);
  dep.set(0, 0, 1);
  EXPECT_DOUBLE_EQ(objective_value(inst, dep), 4.0);
}

TEST(Objective, InitialStateIsNotChargedAsNewBuild) {
  auto inst = hand_instance({{1.0}}, 1.0, 0.0, 3);
  inst.locations[0].x0 = true;
  inst.locations[0].y0 = 2;
  Deployment dep = Deployment::closed(inst);
  dep.set(0, 0, 3);
  // One new post plus operating one station with three posts.
  EXPECT_DOUBLE_EQ(objective_value(inst, dep), 1.0 + 1.0 + 3.0);
}

TEST(Feasibility, CongestionSlackIsExcessDemand) {
  auto inst = hand_instance({{1.0}}, 5.0, 0.0, 1, 4.0);
  Deployment dep = Deployment::closed(inst);
  dep.set(0, 0, 1);
  const auto r = check_feasible(inst, dep);
  ASSERT_FALSE(r.feasible);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].family, ConstraintFamily::Congestion);
  EXPECT_NEAR(r.violations[0].slack, 5.0 - 4.0 * std::sqrt(0.1), 1e-9);
}

TEST(Feasibility, PersistenceAndMonotonicityAlongChain) {
  auto inst = as_chain(hand_instance({{1.0}}, 0.1, 0.0, 3), 2);
  Deployment dep = Deployment::closed(inst);
  dep.set(0, 0, 2);
  dep.set(1, 0, 1);
  auto r = check_feasible(inst, dep);
  EXPECT_TRUE(has_family(r, ConstraintFamily::PostMonotonicity));
  EXPECT_FALSE(has_family(r, ConstraintFamily::StationPersistence));

  dep.set(1, 0, 0);
  r = check_feasible(inst, dep);
  EXPECT_TRUE(has_family(r, ConstraintFamily::StationPersistence));
  EXPECT_TRUE(has_family(r, ConstraintFamily::Coverage));
}

TEST(Feasibility, PostSelectionNeedsConsistentFlags) {
  auto inst = hand_instance({{1.0, 2.0}}, 0.1, 0.0, 2);
  Deployment dep = Deployment::closed(inst);
  dep.set(0, 0, 1);
  dep.open(0, 1) = 1;  // open without posts
  EXPECT_TRUE(has_family(check_feasible(inst, dep), ConstraintFamily::PostSelection));
}

TEST(Formulation, EncodedOptimumSatisfiesEveryRow) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = tiny_instance(seed, 1);
    const auto opt = mip_optimum(inst);
    ASSERT_EQ(opt.status, milp::MipStatus::Optimal);
    const auto built = build_evcec(inst);
    const auto x = encode(inst, coverage_sets(inst), built.index, opt.dep, built.model.num_variables());
    EXPECT_LE(built.model.max_violation(x), 1e-7) << "seed " << seed;
    EXPECT_NEAR(built.model.objective(x), objective_value(inst, opt.dep), 1e-7);
    EXPECT_EQ(decode(inst, built.index, x), opt.dep);
  }
}

TEST(Formulation, OptimumMatchesIndependentCheck) {
  for (std::uint64_t seed = 5; seed <= 8; ++seed) {
    const auto inst = tiny_instance(seed, 0);
    const auto opt = mip_optimum(inst);
    ASSERT_EQ(opt.status, milp::MipStatus::Optimal);
    EXPECT_TRUE(check_feasible(inst, opt.dep).feasible);
    EXPECT_NEAR(opt.z, objective_value(inst, opt.dep), 1e-6 * std::max(1.0, opt.z));
  }
}

TEST(Formulation, SmallOptimumMatchesBruteForce) {
  auto inst = as_chain(hand_instance({{1.0, 3.0}, {4.0, 1.5}}, 1.0, 0.2, 2, 4.0), 2);
  inst.tree[1].w.assign(2, 2.0);
  const auto brute = evcap::test_support::brute_force(inst);
  const auto opt = mip_optimum(inst);
  ASSERT_TRUE(brute.has_value());
  ASSERT_EQ(opt.status, milp::MipStatus::Optimal);
  EXPECT_NEAR(opt.z, brute->z, 1e-7);
}

TEST(Formulation, InfeasibleWhenDemandExceedsCapacity) {
  auto inst = hand_instance({{1.0}}, 50.0, 0.0, 2, 1.0);
  EXPECT_EQ(mip_optimum(inst).status, milp::MipStatus::Infeasible);
}

TEST(Formulation, RelaxedModelDiffersOnlyInPostIndicators) {
  const auto inst = tiny_instance(3, 0);
  const auto full = build_evcec(inst);
  const auto relaxed = build_revcec(inst);
  ASSERT_EQ(full.model.num_variables(), relaxed.model.num_variables());
  ASSERT_EQ(full.model.num_constraints(), relaxed.model.num_constraints());
  std::vector<std::uint8_t> is_post(std::size_t(full.model.num_variables()), 0);
  for (const auto& nv : full.index.nodes) {
    for (const auto& ys : nv.y) {
      for (int v : ys) is_post[std::size_t(v)] = 1;
    }
  }
  for (int v = 0; v < full.model.num_variables(); ++v) {
    const auto& a = full.model.variables()[std::size_t(v)];
    const auto& b = relaxed.model.variables()[std::size_t(v)];
    if (is_post[std::size_t(v)]) {
      EXPECT_EQ(a.kind, milp::VarKind::Binary);
      EXPECT_EQ(b.kind, milp::VarKind::Continuous);
    } else {
      EXPECT_EQ(a.kind, b.kind);
    }
    EXPECT_EQ(a.lower, b.lower);
    EXPECT_EQ(a.upper, b.upper);
  }
  milp::MipLimits lim;
  lim.gap_tol = 1e-9;
  const auto r = milp::solve_mip(relaxed.model, lim);
  const auto f = milp::solve_mip(full.model, lim);
  ASSERT_EQ(r.status, milp::MipStatus::Optimal);
  ASSERT_EQ(f.status, milp::MipStatus::Optimal);
  EXPECT_LE(r.objective, f.objective + 1e-7);
}

TEST(Formulation, LargerQueueThresholdNeverCostsMore) {
  for (std::uint64_t seed = 11; seed <= 13; ++seed) {
    double prev = milp::kInf;
    for (int b = 0; b <= 2; ++b) {
      const auto opt = mip_optimum(tiny_instance(seed, b));
      ASSERT_EQ(opt.status, milp::MipStatus::Optimal);
      EXPECT_LE(opt.z, prev + 1e-6) << "seed " << seed << " b " << b;
      prev = opt.z;
    }
  }
}
