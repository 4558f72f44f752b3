#include <gtest/gtest.h>

#include <cmath>

#include "evcap/errors.hpp"
#include "evcap/formulation.hpp"
#include "evcap/generator.hpp"
#include "evcap/instance.hpp"
#include "support.hpp"

using namespace evcap;

namespace {

Instance one_pair(double d, double radius) {
  auto inst = test_support::hand_instance({{d}}, 1.0, 0.0, 2);
  inst.tree[0].radius = {radius};
  return inst;
}

}  // namespace

TEST(CoverageSets, InsideRadius) {
  const auto cov = coverage_sets(one_pair(3.0, 5.0));
  EXPECT_EQ(cov.zones_near[0][0], std::vector<int>{0});
  EXPECT_EQ(cov.locs_near[0][0], std::vector<int>{0});
}

TEST(CoverageSets, BoundaryIsInclusive) {
  EXPECT_TRUE(coverage_sets(one_pair(5.0, 5.0)).covers(0, 0, 0));
}

TEST(CoverageSets, RadiiArePerNode) {
  auto inst = test_support::as_chain(one_pair(6.0, 7.0), 2);
  inst.tree[0].radius = {5.0};
  // Node 0 leaves the zone uncovered, so build the sets without validation.
  const auto cov = coverage_sets(inst);
  EXPECT_FALSE(cov.covers(0, 0, 0));
  EXPECT_TRUE(cov.covers(1, 0, 0));
}

TEST(CoverageSets, FamiliesAreTransposes) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = generate(preset_params(Preset::Small, 8), seed);
    const auto cov = coverage_sets(inst);
    for (int n = 0; n < inst.num_nodes(); ++n) {
      for (int i = 0; i < inst.num_zones(); ++i) {
        for (int j = 0; j < inst.num_locations(); ++j) {
          const auto& zn = cov.zones_near[std::size_t(n)][std::size_t(j)];
          const auto& ln = cov.locs_near[std::size_t(n)][std::size_t(i)];
          const bool a = std::find(zn.begin(), zn.end(), i) != zn.end();
          const bool b = std::find(ln.begin(), ln.end(), j) != ln.end();
          EXPECT_EQ(a, b);
          EXPECT_EQ(a, inst.dist(std::size_t(i), std::size_t(j)) <= inst.tree[std::size_t(n)].radius[std::size_t(i)]);
        }
      }
    }
  }
}

TEST(Attraction, ExponentialDecay) {
  auto inst = test_support::hand_instance({{0.0, std::log(2.0), 2.0}}, 1.0, 0.0, 1);
  EXPECT_DOUBLE_EQ(attraction(inst, 0, 0), 1.0);
  EXPECT_NEAR(attraction(inst, 0, 1), 0.5, 1e-15);
  inst.zones[0].a = 0.5;
  EXPECT_NEAR(attraction(inst, 0, 2), std::exp(-1.0), 1e-15);
}

TEST(Generator, DeterministicForFixedSeed) {
  const auto p = preset_params(Preset::Small, 10);
  EXPECT_EQ(generate(p, 7), generate(p, 7));
  EXPECT_NE(generate(p, 7), generate(p, 8));
}

TEST(Generator, UniformTreeNodeCount) {
  GeneratorParams p;
  p.depth = 3;
  p.branching = 3;
  EXPECT_EQ(p.node_count(), 13);
  EXPECT_EQ(generate(p, 1).num_nodes(), 13);
  EXPECT_EQ(preset_params(Preset::Small, 8).node_count(), 8);
  EXPECT_EQ(preset_params(Preset::Medium, 8).node_count(), 16);
}

TEST(Generator, PresetBinaryCounts) {
  EXPECT_EQ(build_evcec(generate(preset_params(Preset::Small, 10), 7)).model.num_binaries(), 1320);
  EXPECT_EQ(build_evcec(generate(preset_params(Preset::Small, 8), 7)).model.num_binaries(), 1080);
}

TEST(Generator, RejectsBadParameters) {
  GeneratorParams p;
  p.n_zones = 0;
  EXPECT_THROW(generate(p, 1), ParameterError);
  p = GeneratorParams{};
  p.radius = {5.0, 1.0};
  EXPECT_THROW(generate(p, 1), ParameterError);
}

TEST(Generator, HundredSeedsValidPerPreset) {
  for (auto preset : {Preset::Small, Preset::Medium}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto inst = generate(preset_params(preset, 10), seed);
      EXPECT_TRUE(validation_problems(inst).empty()) << "seed " << seed;
    }
  }
}

TEST(Instance, ProbabilitiesPartitionParentMass) {
  const auto inst = generate(preset_params(Preset::Medium, 8), 3);
  EXPECT_DOUBLE_EQ(inst.tree[0].prob, 1.0);
  for (int n = 0; n < inst.num_nodes(); ++n) {
    const auto kids = inst.children(n);
    if (kids.empty()) continue;
    double sum = 0.0;
    for (int c : kids) sum += inst.tree[std::size_t(c)].prob;
    EXPECT_NEAR(sum, inst.tree[std::size_t(n)].prob, 1e-12);
  }
}

TEST(Validate, UncoveredZoneIsReported) {
  auto inst = one_pair(6.0, 5.0);
  try {
    validate(inst);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.problems().size(), 1u);
    EXPECT_NE(e.problems()[0].find("zone 0"), std::string::npos);
    EXPECT_NE(e.problems()[0].find("coverage"), std::string::npos);
  }
}

TEST(Validate, InitialPostsNeedAStation) {
  auto inst = one_pair(1.0, 5.0);
  inst.locations[0].y0 = 1;
  EXPECT_THROW(validate(inst), ValidationError);
  inst.locations[0].x0 = true;
  EXPECT_NO_THROW(validate(inst));
  inst.locations[0].y0 = 3;
  EXPECT_THROW(validate(inst), ValidationError);
}
