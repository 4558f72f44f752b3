#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evcap/errors.hpp"
#include "evcap/queueing.hpp"

namespace q = evcap::queueing;

namespace {

// Birth-death probabilities of M/M/s summed term by term up to n_max.
std::vector<double> birth_death(double lambda, double mu, int s, int n_max) {
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  p[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) p[static_cast<std::size_t>(n)] = p[static_cast<std::size_t>(n) - 1] * lambda / (mu * std::min(n, s));
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

TEST(ServiceLevelLhs, ClosedFormsForOneServer) {
  EXPECT_DOUBLE_EQ(q::service_level_lhs(1, 0, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(q::service_level_lhs(1, 1, 0.5), 8.0);
}

TEST(ServiceLevelLhs, TwoServersMatchHandExpansion) {
  // 4 / rho^3 + 2 / rho^2 at rho = 0.8.
  EXPECT_NEAR(q::service_level_lhs(2, 0, 0.8), 10.9375, 1e-12);
}

TEST(ServiceLevelLhs, RejectsOutOfDomain) {
  EXPECT_THROW(q::service_level_lhs(1, 0, 0.0), evcap::DomainError);
  EXPECT_THROW(q::service_level_lhs(0, 0, 0.5), evcap::DomainError);
  EXPECT_THROW(q::service_level_lhs(q::kMaxServers + 1, 0, 0.5), evcap::DomainError);
}

TEST(ServiceLevelLhs, StrictlyDecreasingInRho) {
  for (int m = 1; m <= 10; ++m) {
    for (int b = 0; b <= 5; ++b) {
      double prev = q::service_level_lhs(m, b, 0.05 * m);
      for (int s = 2; s <= 20; ++s) {
        const double cur = q::service_level_lhs(m, b, 0.05 * m * s);
        EXPECT_LT(cur, prev) << "m=" << m << " b=" << b;
        prev = cur;
      }
    }
  }
}

TEST(RhoAlpha, ClosedForms) {
  EXPECT_NEAR(q::rho_alpha(1, 0, 0.9), std::sqrt(0.1), 1e-9);
  EXPECT_NEAR(q::rho_alpha(1, 1, 0.9), std::cbrt(0.1), 1e-9);
}

TEST(RhoAlpha, FrozenOracleValues) {
  // High-precision root finding on L(m, 0, rho) = 10.
  EXPECT_NEAR(q::rho_alpha(2, 0, 0.9), 0.826886966104928, 1e-9);
  EXPECT_NEAR(q::rho_alpha(3, 0, 0.9), 1.42455326079038, 1e-9);
  EXPECT_NEAR(q::rho_alpha(4, 0, 0.9), 2.07471531596562, 1e-9);
  EXPECT_NEAR(q::rho_alpha(2, 1, 0.9), 1.05106046704283, 1e-9);
}

TEST(RhoAlpha, SolvesTheServiceEquation) {
  for (double alpha : {0.5, 0.9, 0.95}) {
    const double target = 1.0 / (1.0 - alpha);
    for (int m = 1; m <= 10; ++m) {
      for (int b = 0; b <= 5; ++b) {
        const double r = q::rho_alpha(m, b, alpha);
        EXPECT_NEAR(q::service_level_lhs(m, b, r) / target, 1.0, 1e-9);
      }
    }
  }
}

TEST(RhoAlpha, DecreasesAsServiceLevelRises) {
  for (int m = 1; m <= 6; ++m) {
    EXPECT_GT(q::rho_alpha(m, 1, 0.8), q::rho_alpha(m, 1, 0.9));
    EXPECT_GT(q::rho_alpha(m, 1, 0.9), q::rho_alpha(m, 1, 0.95));
  }
}

TEST(RhoTable, EntriesMatchPointwiseRoots) {
  const auto t = q::RhoTable::build(2, 0, 0.9);
  ASSERT_EQ(t.max_posts(), 2);
  EXPECT_NEAR(t[1], 0.316227766016838, 1e-9);
  EXPECT_NEAR(t[2], 0.826886966104928, 1e-9);
  const auto single = q::RhoTable::build(1, 0, 0.9);
  EXPECT_EQ(single.max_posts(), 1);
}

TEST(RhoTable, StrictlyIncreasing) {
  const auto t = q::RhoTable::build(10, 2, 0.5);
  for (int k = 2; k <= 10; ++k) EXPECT_GT(t[k], t[k - 1]);
}

TEST(MmsMeasures, SingleServer) {
  const auto m = q::mms_measures(0.5, 1.0, 1, 0);
  EXPECT_TRUE(m.stable);
  EXPECT_NEAR(m.lq, 0.5, 1e-12);
  EXPECT_NEAR(m.wq, 1.0, 1e-12);
  EXPECT_NEAR(m.p0, 0.5, 1e-12);
  EXPECT_NEAR(m.p_le_b, 0.75, 1e-12);
}

TEST(MmsMeasures, ThreeServers) {
  const auto m = q::mms_measures(2.0, 1.0, 3, 0);
  EXPECT_NEAR(m.lq, 8.0 / 9.0, 1e-12);
  EXPECT_NEAR(m.wq, 4.0 / 9.0, 1e-12);
  EXPECT_NEAR(m.p0, 1.0 / 9.0, 1e-12);
  EXPECT_NEAR(m.p_le_b, 19.0 / 27.0, 1e-12);
}

TEST(MmsMeasures, UnstableAndIdle) {
  EXPECT_FALSE(q::mms_measures(3.0, 1.0, 2, 0).stable);
  EXPECT_FALSE(q::mms_measures(3.0, 1.0, 2, 4).stable);
  const auto idle = q::mms_measures(0.0, 1.0, 2, 0);
  EXPECT_TRUE(idle.stable);
  EXPECT_EQ(idle.wq, 0.0);
  EXPECT_EQ(idle.p_le_b, 1.0);
  EXPECT_THROW(q::mms_measures(1.0, 0.0, 1, 0), evcap::DomainError);
}

TEST(MmsMeasures, ClosedFormMatchesTruncatedSums) {
  for (int s = 1; s <= 6; ++s) {
    for (double util : {0.1, 0.5, 0.8, 0.95}) {
      const double lambda = util * s;
      const auto p = birth_death(lambda, 1.0, s, 4000);
      double lq = 0.0;
      for (std::size_t n = static_cast<std::size_t>(s); n < p.size(); ++n) lq += (double(n) - s) * p[n];
      const auto m = q::mms_measures(lambda, 1.0, s, 2);
      EXPECT_NEAR(m.lq, lq, 1e-9) << "s=" << s << " util=" << util;
      EXPECT_NEAR(m.p0, p[0], 1e-12);
      double le = 0.0;
      for (int n = 0; n <= s + 2; ++n) le += p[static_cast<std::size_t>(n)];
      EXPECT_NEAR(m.p_le_b, le, 1e-12);
    }
  }
}

TEST(MmsMeasures, ProbabilityOfShortQueueGrowsWithB) {
  double prev = 0.0;
  for (int b = 0; b <= 8; ++b) {
    const double p = q::mms_measures(2.5, 1.0, 3, b).p_le_b;
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(MmsMeasures, ThresholdTrafficMeetsTheServiceLevel) {
  for (double alpha : {0.8, 0.9}) {
    for (int s = 1; s <= 6; ++s) {
      for (int b = 0; b <= 3; ++b) {
        const double lambda = q::rho_alpha(s, b, alpha);
        EXPECT_GE(q::mms_measures(lambda, 1.0, s, b).p_le_b, alpha - 1e-6);
        EXPECT_LT(q::mms_measures(1.01 * lambda, 1.0, s, b).p_le_b, alpha);
      }
    }
  }
}
