#include <gtest/gtest.h>

#include "evcap/errors.hpp"
#include "evcap/generator.hpp"
#include "evcap/heuristic.hpp"
#include "support.hpp"

using namespace evcap;
using evcap::test_support::as_chain;
using evcap::test_support::hand_instance;
using evcap::test_support::mip_optimum;
using evcap::test_support::tiny_instance;

TEST(MinPosts, SmallestSufficientCount) {
  const auto rho = queueing::RhoTable::build(4, 0, 0.9);
  EXPECT_EQ(heuristic::min_posts(1.2, 4.0, rho, 4, 0), 1);
  EXPECT_EQ(heuristic::min_posts(0.0, 4.0, rho, 4, 0), 1);
  EXPECT_EQ(heuristic::min_posts(100.0, 4.0, rho, 2, 0), std::nullopt);
  EXPECT_EQ(heuristic::min_posts(0.0, 4.0, rho, 4, 3), 3);
  const int k = *heuristic::min_posts(6.0, 4.0, rho, 4, 0);
  EXPECT_GE(4.0 * rho[k], 6.0);
  EXPECT_LT(4.0 * rho[k - 1], 6.0);
}

TEST(Criterion, NamesRoundTrip) {
  for (auto c : {heuristic::Criterion::MostZones, heuristic::Criterion::LowestCost,
                 heuristic::Criterion::LowestCostPerZone}) {
    EXPECT_EQ(heuristic::parse_criterion(heuristic::to_string(c)), c);
  }
  EXPECT_THROW(heuristic::parse_criterion("fastest"), ParameterError);
}

TEST(Greedy, SingleStationSizedToDemand) {
  const auto inst = hand_instance({{1.0}}, 6.0, 0.0, 4, 4.0);
  const auto dep = heuristic::greedy(inst, heuristic::Criterion::MostZones);
  EXPECT_TRUE(check_feasible(inst, dep).feasible);
  const auto rho = rho_table_for(inst);
  EXPECT_EQ(dep.posts(0, 0), *heuristic::min_posts(6.0, 4.0, rho, 4, 0));
}

TEST(Greedy, SpillsOverToSecondStation) {
  // One post can never absorb the demand, so a second station is needed.
  const auto inst = hand_instance({{1.0, 1.0}}, 2.0, 0.0, 1, 4.0);
  const auto dep = heuristic::greedy(inst, heuristic::Criterion::LowestCost);
  EXPECT_TRUE(check_feasible(inst, dep).feasible);
  EXPECT_EQ(dep.open(0, 0) + dep.open(0, 1), 2);
}

TEST(Greedy, ThrowsWhenNothingFits) {
  const auto inst = hand_instance({{1.0}}, 50.0, 0.0, 2, 1.0);
  EXPECT_THROW(heuristic::greedy(inst, heuristic::Criterion::MostZones), InfeasibleError);
}

TEST(Greedy, EveryCriterionFeasibleAndAboveOptimum) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = tiny_instance(seed, 0);
    const auto opt = mip_optimum(inst);
    ASSERT_EQ(opt.status, milp::MipStatus::Optimal);
    for (auto c : {heuristic::Criterion::MostZones, heuristic::Criterion::LowestCost,
                   heuristic::Criterion::LowestCostPerZone}) {
      const auto dep = heuristic::greedy(inst, c);
      EXPECT_TRUE(check_feasible(inst, dep).feasible);
      EXPECT_GE(objective_value(inst, dep), opt.z - 1e-6);
    }
  }
}

TEST(Greedy, KeepsInitialStateAlongChain) {
  auto inst = as_chain(hand_instance({{1.0, 2.0}}, 1.0, 0.0, 3), 3);
  inst.locations[1].x0 = true;
  inst.locations[1].y0 = 2;
  const auto dep = heuristic::greedy(inst, heuristic::Criterion::LowestCost);
  EXPECT_TRUE(check_feasible(inst, dep).feasible);
  for (int n = 0; n < 3; ++n) EXPECT_GE(dep.posts(std::size_t(n), 1), 2);
}

TEST(LocalSearch, NeverWorsensAndStaysFeasible) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = tiny_instance(seed, 1);
    const auto start = heuristic::greedy(inst, heuristic::Criterion::MostZones);
    const auto improved = heuristic::local_search(inst, start);
    EXPECT_TRUE(check_feasible(inst, improved).feasible);
    EXPECT_LE(objective_value(inst, improved), objective_value(inst, start) + 1e-9);
  }
}

TEST(BestGreedy, NoWorseThanAnySingleCriterion) {
  const auto inst = generate(preset_params(Preset::Small, 10), 3);
  const double best = objective_value(inst, heuristic::best_greedy(inst));
  for (auto c : {heuristic::Criterion::MostZones, heuristic::Criterion::LowestCost,
                 heuristic::Criterion::LowestCostPerZone}) {
    EXPECT_LE(best, objective_value(inst, heuristic::greedy(inst, c)) + 1e-9);
  }
}
