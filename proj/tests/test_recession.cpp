#include <gtest/gtest.h>

#include <cmath>

#include "losssense/fixtures.hpp"
#include "losssense/recession.hpp"

using namespace losssense;

namespace {

FunctionalSpec adj_es_finite() { return FunctionalSpec::adj_es(GProfile(0.0, {{0.1, 2.0}, {0.5, 0.4}, {1.0, 0.0}})); }

}  // namespace

TEST(Recession, EntropicConvergesToWorstLoss) {
  // log(0.5 + 0.5 e^lambda) / lambda -> 1
  Position x = binary_position(0.5, -1.0, 0.0);
  auto r = recession(FunctionalSpec::entropic(1.0), x, {20, 0.0});
  ASSERT_FALSE(r.ratio_trace.empty());
  EXPECT_EQ(r.ratio_trace.back().lambda, std::ldexp(1.0, 20));
  EXPECT_NEAR(r.ratio_trace.back().ratio.value(), 1.0, 1e-4);
  for (std::size_t k = 0; k < r.ratio_trace.size(); ++k) {
    double l = r.ratio_trace[k].lambda;
    // log(0.5 + 0.5 e^l) rewritten to stay finite for large l
    EXPECT_NEAR(r.ratio_trace[k].ratio.value(), (l + std::log(0.5 + 0.5 * std::exp(-l))) / l, 1e-9);
  }
  auto full = recession(FunctionalSpec::entropic(1.0), x);
  EXPECT_EQ(full.mode, RecessionMode::numeric_converged);
  EXPECT_NEAR(full.value.value(), 1.0, 1e-6);
}

TEST(Recession, HomogeneousSpecsAreAnalytic) {
  Rng rng(42);
  for (int t = 0; t < 50; ++t) {
    Position x = random_position(rng);
    for (const auto& s : {FunctionalSpec::var(0.1), FunctionalSpec::es(0.05), FunctionalSpec::worst_case()}) {
      auto r = recession(s, x);
      EXPECT_EQ(r.mode, RecessionMode::analytic);
      EXPECT_EQ(r.value.value(), evaluate(s, x).value());
    }
  }
}

TEST(Recession, LossVaRAndAdjustedESClosedForms) {
  Rng rng(42);
  auto lv0 = FunctionalSpec::lvar(AlphaProfile::sampled([](double l) { return 0.5 * std::exp(l); }, -10.0, 64, 0.0));
  auto lv2 = FunctionalSpec::lvar(
      AlphaProfile::sampled([](double l) { return 0.02 + 0.1 * std::exp(l); }, -10.0, 64, 0.02));
  auto ag = FunctionalSpec::adj_es(GProfile(0.2, {{0.2, 1.0}, {1.0, 0.0}}));
  for (int t = 0; t < 50; ++t) {
    Position x = random_position(rng);
    EXPECT_EQ(recession(lv0, x).value.value(), ess_sup_neg(x));
    EXPECT_EQ(recession(lv2, x).value.value(), var(x, 0.02));
    EXPECT_NEAR(recession(ag, x).value.value(), es(x, 0.2), 1e-12);
    EXPECT_NEAR(recession(adj_es_finite(), x).value.value(), ess_sup_neg(x), 1e-12);
  }
}

TEST(Recession, PositivelyHomogeneousInX) {
  Rng rng(42);
  auto ent = FunctionalSpec::entropic(1.0);
  for (int t = 0; t < 20; ++t) {
    Position x = random_position(rng, 2, 5, -5.0, 5.0);
    double base = recession(ent, x).value.value();
    for (double l : {0.5, 2.0, 7.0}) EXPECT_NEAR(recession(ent, l * x).value.value(), l * base, 1e-6 * l);
  }
}

TEST(Recession, DominatesValueForStarShapedSpecs) {
  Rng rng(42);
  for (const auto& s : {FunctionalSpec::entropic(0.5), FunctionalSpec::expected_utility(exponential_utility(1.0)),
                        FunctionalSpec::shortfall(exponential_loss(1.0))}) {
    for (int t = 0; t < 50; ++t) {
      Position x = random_position(rng, 2, 6, -4.0, 4.0);
      auto r = recession(s, x);
      double sign = orientation(s);
      EXPECT_GE(sign * r.value.value(), sign * evaluate(s, x).value() - 1e-9);
      for (std::size_t k = 1; k < r.ratio_trace.size(); ++k) {
        double a = sign * r.ratio_trace[k - 1].ratio.value(), b = sign * r.ratio_trace[k].ratio.value();
        if (std::isfinite(a) && std::isfinite(b)) EXPECT_GE(b, a - 1e-9);
      }
    }
  }
}

TEST(Recession, NonStarShapedSpecIsLowerBound) {
  auto spec = fixture_detail::recession_risk_spec(0.1);
  Position x = binary_position(0.05, -1.0, 1.0);
  auto r = recession(spec, x);
  EXPECT_EQ(r.mode, RecessionMode::numeric_lower_bound);
  EXPECT_EQ(r.ratio_trace.front().lambda, std::ldexp(1.0, -40));
  EXPECT_NEAR(r.value.value(), 1.0, 1e-9);
}

TEST(Recession, InfiniteValuePropagates) {
  auto eu = FunctionalSpec::expected_utility(
      UtilityFn({Piece{-kInf, -1.0, form::NegInfinity{}}, Piece{-1.0, kInf, form::Linear{1.0, 0.0}}}));
  Position x = binary_position(0.5, -0.1, 1.0);
  auto r = recession(eu, x);
  EXPECT_TRUE(r.value.is_minus_infinity());
}

TEST(Induced, CashAdditiveSpecsCoincide) {
  Rng rng(42);
  for (const auto& s : {FunctionalSpec::var(0.1), FunctionalSpec::es(0.2), FunctionalSpec::entropic(1.0),
                        adj_es_finite()}) {
    for (int t = 0; t < 50; ++t) {
      Position x = random_position(rng);
      EXPECT_NEAR(induced_cash_additive(s, x).value(), evaluate(s, x).value(), 1e-8) << s.name();
    }
  }
}

TEST(Induced, ShortfallByIndependentBisection) {
  Rng rng(42);
  LossFn l = exponential_loss(0.7);
  auto spec = FunctionalSpec::shortfall(l);
  for (int t = 0; t < 50; ++t) {
    Position x = random_position(rng);
    double lo = -100.0, hi = 100.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (expected_loss(l, x, mid) <= 0.0 ? hi : lo) = mid;
    }
    EXPECT_NEAR(induced_cash_additive(spec, x).value(), hi, 1e-8);
  }
}

TEST(Induced, RecessionCommutesWithInducedForm) {
  Rng rng(42);
  auto ent = FunctionalSpec::entropic(1.0);
  for (int t = 0; t < 30; ++t) {
    Position x = random_position(rng, 2, 5, -5.0, 5.0);
    double rec = recession(ent, x).value.value();
    // a cash-additive functional induces itself, so both ratio sequences share the limit
    double ind = induced_cash_additive(ent, std::ldexp(1.0, 30) * x).value() / std::ldexp(1.0, 30);
    EXPECT_NEAR(rec, ind, 1e-6);
  }
}

TEST(Induced, RiskFunctionalCheck) {
  EXPECT_TRUE(is_risk_functional_induced(FunctionalSpec::var(0.1)).holds);
  EXPECT_TRUE(is_risk_functional_induced(FunctionalSpec::worst_case()).holds);
  auto zero = FunctionalSpec::custom(Kind::risk, "zero", [](const Position&) { return Extended::finite(0.0); },
                                     {true, true, false, true, true, true});
  auto c = is_risk_functional_induced(zero);
  EXPECT_FALSE(c.holds);
  ASSERT_TRUE(c.witness_m.has_value());
  EXPECT_EQ(*c.witness_m, -1.0);
}
