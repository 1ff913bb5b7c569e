#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prefsim/errors.hpp"
#include "prefsim/theory.hpp"

using namespace prefsim;

namespace {
const BasePolicy kReferenceBase(0.8, MessagePool(10, 100));
const TypeDistribution kReferenceTypes(0.6);
}  // namespace

TEST(FThreshold, PairsAlwaysGiveOneHalf) {
  for (int i = 1; i <= 1000; ++i) {
    const double zeta = static_cast<double>(i) / 1001.0;
    EXPECT_NEAR(f_threshold(zeta, 2), 0.5, 1e-12);
  }
}

TEST(FThreshold, HandValues) {
  EXPECT_NEAR(f_threshold(0.8, 3), 0.6, 1e-14);
  EXPECT_NEAR(f_threshold(0.8, 4), 0.3904 / 0.5888, 1e-14);
  EXPECT_NEAR(f_threshold(0.8, 4), 0.66304, 1e-5);
  EXPECT_NEAR(f_threshold(0.8, 5), 0.47232 / 0.672, 1e-14);
}

TEST(FThreshold, MatchesConditionalExpectation) {
  for (std::size_t k = 2; k <= 10; ++k) {
    for (int i = 1; i < 100; ++i) {
      const double zeta = i / 100.0;
      EXPECT_NEAR(f_threshold(zeta, k), oracle::conditional_m1_fraction(zeta, k), 1e-12)
          << "k=" << k << " zeta=" << zeta;
    }
  }
}

TEST(FThreshold, StableNearTheEdgesAndForLargeSets) {
  // F(0+) = 1/k and F(1-) = (k-1)/k.
  EXPECT_NEAR(f_threshold(1e-12, 4), 0.25, 1e-9);
  EXPECT_NEAR(f_threshold(1.0 - 1e-12, 4), 0.75, 1e-9);
  for (std::size_t k : {100u, 129u, 500u}) {
    const double direct = (0.8 - std::pow(0.8, k)) / (1.0 - std::pow(0.8, k) - std::pow(0.2, k));
    EXPECT_NEAR(f_threshold(0.8, k), direct, 1e-12);
  }
  EXPECT_NEAR(f_threshold(0.5, 200), 0.5, 1e-12);
}

TEST(FThreshold, DomainErrors) {
  EXPECT_THROW(f_threshold(0.0, 3), DomainError);
  EXPECT_THROW(f_threshold(1.0, 3), DomainError);
  EXPECT_THROW(f_threshold(-0.5, 3), DomainError);
  EXPECT_THROW(f_threshold(0.5, 1), InvalidParameter);
}

TEST(PredictFailure, ReferenceSetup) {
  const auto two = predict_rlpo_failure(kReferenceBase, kReferenceTypes, 2);
  EXPECT_FALSE(two.condition_holds);
  EXPECT_EQ(two.direction, FailureDirection::kPreferM1);
  const auto three = predict_rlpo_failure(kReferenceBase, kReferenceTypes, 3);
  EXPECT_FALSE(three.condition_holds);
  EXPECT_EQ(three.direction, FailureDirection::kBoundary);
  const auto four = predict_rlpo_failure(kReferenceBase, kReferenceTypes, 4);
  EXPECT_TRUE(four.condition_holds);
  EXPECT_EQ(four.direction, FailureDirection::kCollapseToM2);
  EXPECT_EQ(four.set_size, 4u);
  EXPECT_TRUE(predict_rlpo_failure(kReferenceBase, kReferenceTypes, 5).condition_holds);
  EXPECT_EQ(to_string(FailureDirection::kCollapseToM2), "collapse_to_M2");
}

TEST(BothCategoriesRate, HandValues) {
  EXPECT_NEAR(both_categories_rate(kReferenceBase, 2), 0.32, 1e-15);
  EXPECT_NEAR(both_categories_rate(BasePolicy(0.5, MessagePool(1, 1)), 2), 0.5, 1e-15);
  EXPECT_NEAR(both_categories_rate(kReferenceBase, 64), 1.0, 1e-6);
}

TEST(DefaultEta, PositiveOnlyWhenConditionHolds) {
  const double s = both_categories_rate(kReferenceBase, 4);
  EXPECT_NEAR(default_eta(kReferenceBase, kReferenceTypes, 4), s * s * (f_threshold(0.8, 4) - 0.6) / 4.0,
              1e-15);
  EXPECT_THROW(default_eta(kReferenceBase, kReferenceTypes, 2), DomainError);
  EXPECT_THROW(default_eta(kReferenceBase, kReferenceTypes, 3), DomainError);
}

TEST(EventEta, ClauseEvaluation) {
  SufficientStats t(5);
  t.add(3, Category::kOne, 5);
  t.add(3, Category::kTwo, 5);
  const auto rho = rho_stats(t);
  EXPECT_NEAR(rho.rho_data, 0.6, 1e-15);
  EXPECT_NEAR(rho.rho_chosen, 0.5, 1e-15);
  EXPECT_TRUE(event_eta_holds(t, 0.05));
  EXPECT_FALSE(event_eta_holds(t, 0.2));
  SufficientStats none(3);
  none.add(2, Category::kTwo, 3);
  EXPECT_FALSE(event_eta_holds(none, 1e-6));
  EXPECT_THROW(event_eta_holds(t, 0.0), InvalidParameter);
}

TEST(EventIl, ClauseEvaluation) {
  SufficientStats s(2);
  s.add(1, Category::kOne, 5);
  s.add(1, Category::kTwo, 10);
  EXPECT_TRUE(event_il_holds(s, 1.0, kReferenceTypes));
  SufficientStats one(2);
  one.add(1, Category::kOne, 1);
  one.add(1, Category::kTwo, 10);
  EXPECT_FALSE(event_il_holds(one, 1.0, kReferenceTypes));
  SufficientStats two(2);
  two.add(1, Category::kOne, 5);
  two.add(1, Category::kTwo, 2);
  EXPECT_FALSE(event_il_holds(two, 1.0, kReferenceTypes));
  // With p*(2) > p*(1) the log term is active: 2 * 5 * ln 4 > 1 + 5.
  SufficientStats many(2);
  many.add(1, Category::kOne, 5);
  many.add(1, Category::kTwo, 12);
  EXPECT_FALSE(event_il_holds(many, 5.0, TypeDistribution(0.2)));
  EXPECT_TRUE(event_il_holds(many, 5.0, TypeDistribution(0.5)));
}

TEST(IlAsymptotic, ClosedForm) {
  EXPECT_NEAR(il_asymptotic_mass(kReferenceTypes, MessagePool(10, 100)).mass1, 15.0 / 115.0, 1e-15);
  EXPECT_NEAR(il_asymptotic_mass(TypeDistribution(0.5), MessagePool(10, 10)).mass1, 0.5, 1e-15);
  EXPECT_NEAR(il_asymptotic_mass(kReferenceTypes, MessagePool(10, 1000)).mass1, 15.0 / 1015.0, 1e-15);
  EXPECT_FALSE(il_asymptotic_mass(kReferenceTypes, MessagePool(10, 10)).regime.empty());
}
