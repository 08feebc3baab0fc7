#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "losssense/fixtures.hpp"
#include "losssense/sensitivity.hpp"

using namespace losssense;

namespace {

double native(const FunctionalSpec& s, const Position& x) { return evaluate(s, x).value(); }

FunctionalSpec lvar_with_limit(double alpha_inf) {
  if (alpha_inf == 0.0)
    return FunctionalSpec::lvar(AlphaProfile::sampled([](double l) { return 0.5 * std::exp(l); }, -10.0, 64, 0.0));
  return FunctionalSpec::lvar(
      AlphaProfile::sampled([=](double l) { return alpha_inf + 0.1 * std::exp(l); }, -10.0, 64, alpha_inf));
}

// Specs whose full-space verdict is decided by a closed-form criterion.
std::vector<FunctionalSpec> analytic_specs() {
  return {FunctionalSpec::var(0.05),
          FunctionalSpec::es(0.05),
          FunctionalSpec::worst_case(),
          FunctionalSpec::entropic(1.0),
          lvar_with_limit(0.0),
          lvar_with_limit(0.02),
          FunctionalSpec::adj_es(GProfile(0.0, {{0.1, 1.0}, {1.0, 0.0}})),
          FunctionalSpec::adj_es(GProfile(0.2, {{0.2, 1.0}, {1.0, 0.0}})),
          FunctionalSpec::shortfall(exponential_loss(1.0)),
          FunctionalSpec::expected_utility(power_s_utility(0.3, 0.5)),
          FunctionalSpec::expected_utility(power_s_utility(0.5, 0.3)),
          FunctionalSpec::oce(oce_remark_utility()),
          FunctionalSpec::oce(exponential_utility(1.0))};
}

// Re-evaluates an insensitive verdict's witness directly.
void expect_witness_holds(const FunctionalSpec& spec, const SensitivityVerdict& v, const DomainSpec& d) {
  ASSERT_EQ(v.status, Status::insensitive);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_GT(prob_negative(*v.witness), 0.0);
  EXPECT_TRUE(d.contains(*v.witness));
  ASSERT_TRUE(v.evidence.has_value());
  for (const auto& lv : v.evidence->sequence) {
    double r = risk_value(spec, lv.lambda * *v.witness).value();
    EXPECT_LE(r, 1e-12 * std::max(1.0, lv.lambda * sup_norm(*v.witness))) << spec.name() << " lambda " << lv.lambda;
  }
}

}  // namespace

TEST(Domains, BuiltinFlags) {
  auto sure = DomainSpec::sure_losses(), pure = DomainSpec::pure_losses(), exp = DomainSpec::expected_losses(),
       full = DomainSpec::full();
  EXPECT_TRUE(sure.is_cone);
  EXPECT_FALSE(sure.cash_stable);
  EXPECT_TRUE(pure.is_cone);
  EXPECT_TRUE(exp.is_cone);
  EXPECT_TRUE(full.is_cone);
  EXPECT_TRUE(full.cash_stable);
  EXPECT_EQ(builtin_domains().size(), 4u);
  EXPECT_EQ(domain_by_name("pure")->tag, DomainTag::pure_losses);
  EXPECT_FALSE(domain_by_name("nowhere").has_value());
}

TEST(Domains, DefaultSamplersStayInside) {
  for (const auto& d : builtin_domains()) {
    Rng a(42), b(42);
    Sampler s = default_sampler(d);
    for (int i = 0; i < 200; ++i) {
      Position x = s(a), y = s(b);
      EXPECT_TRUE(d.contains(x)) << d.name;
      EXPECT_TRUE(has_losses(x)) << d.name;
      EXPECT_EQ(x.outcomes(), y.outcomes());
    }
  }
}

TEST(Domains, SamplerContractViolationIsAnInternalError) {
  SllOptions opt;
  opt.trials = 5;
  opt.sampler = [](Rng&) { return binary_position(0.5, -1.0, 1.0); };  // not a pure loss
  EXPECT_THROW(sll_certify(fixture_detail::recession_risk_spec(0.1), DomainSpec::pure_losses(), opt),
               std::logic_error);
}

TEST(SensitiveToLosses, Examples) {
  Position x = binary_position(0.05, -1.0, 0.0);
  EXPECT_FALSE(sensitive_to_losses(FunctionalSpec::var(0.1), x));
  EXPECT_TRUE(sensitive_to_losses(FunctionalSpec::worst_case(), x));
  Position y = binary_position(0.5, 1.0, -1.0 / 3.0);
  EXPECT_FALSE(sensitive_to_losses(FunctionalSpec::expected_utility(exponential_utility(1.0)), y));
  EXPECT_TRUE(sensitive_to_losses(FunctionalSpec::var(0.1), binary_position(0.5, 1.0, 2.0)));  // no losses
}

TEST(SllPosition, EntropicFindsThreshold) {
  Position x = binary_position(0.5, -1.0, 2.0);
  auto v = sll_position(FunctionalSpec::entropic(1.0), x);
  ASSERT_EQ(v.outcome, PositionOutcome::certified_sensitive);
  ASSERT_TRUE(v.lambda_x.has_value());
  EXPECT_GT(native(FunctionalSpec::entropic(1.0), *v.lambda_x * x), 0.0);
  if (*v.lambda_x > 1.0) EXPECT_LE(native(FunctionalSpec::entropic(1.0), (*v.lambda_x / 2.0) * x), 0.0);
}

TEST(SllPosition, HomogeneousInsensitive) {
  auto v = sll_position(FunctionalSpec::es(0.1), binary_position(0.05, -1.0, 1.0));
  EXPECT_EQ(v.outcome, PositionOutcome::certified_insensitive);
  EXPECT_EQ(v.evidence.sequence.size(), 41u);
}

TEST(SllPosition, RayIdentityOnNonStarRiskFunctional) {
  auto spec = fixture_detail::recession_risk_spec(0.1);
  auto v = sll_position(spec, binary_position(0.05, -1.0, 1.0));
  EXPECT_EQ(v.outcome, PositionOutcome::certified_insensitive);
  // with X = -1_A the values stay at min{lambda, 1} > 0: never certified insensitive
  auto w = sll_position(spec, binary_position(0.05, -1.0, 0.0));
  EXPECT_NE(w.outcome, PositionOutcome::certified_insensitive);
}

TEST(SllPosition, RequiresLosses) {
  EXPECT_THROW(sll_position(FunctionalSpec::es(0.1), binary_position(0.5, 0.0, 1.0)), ParameterError);
}

TEST(SllCertify, CatalogExamples) {
  auto full = DomainSpec::full();
  EXPECT_EQ(sll_certify(FunctionalSpec::expected_utility(power_s_utility(0.3, 0.5)), full).method, Method::tail_ratio);
  auto es = FunctionalSpec::es(0.1);
  auto v = sll_certify(es, full);
  expect_witness_holds(es, v, full);
  auto e = sll_certify(es, DomainSpec::expected_losses());
  EXPECT_EQ(e.status, Status::sensitive);
  EXPECT_EQ(e.method, Method::strict_expectation_bound);
}

TEST(SllCertify, LossVaRDichotomy) {
  auto full = DomainSpec::full();
  EXPECT_EQ(sll_certify(lvar_with_limit(0.0), full).status, Status::sensitive);
  auto spec = lvar_with_limit(0.02);
  auto v = sll_certify(spec, full);
  expect_witness_holds(spec, v, full);
  EXPECT_NEAR(v.witness->prob(0), 0.01, 1e-15);
  EXPECT_EQ(v.witness->outcome(0), -1.0);
}

TEST(SllCertify, AdjustedESDichotomy) {
  auto full = DomainSpec::full();
  EXPECT_EQ(sll_certify(FunctionalSpec::adj_es(GProfile(0.0, {{0.1, 1.0}, {1.0, 0.0}})), full).status,
            Status::sensitive);
  auto spec = FunctionalSpec::adj_es(GProfile(0.2, {{0.2, 1.0}, {1.0, 0.0}}));
  expect_witness_holds(spec, sll_certify(spec, full), full);
}

TEST(SllCertify, OCECriterion) {
  auto full = DomainSpec::full();
  EXPECT_EQ(sll_certify(FunctionalSpec::oce(exponential_utility(1.0)), full).status, Status::sensitive);
  for (const auto& u : {oce_remark_utility(0.5, 2.0), linear_utility(), fixture_detail::kinked_linear_utility(0.5)}) {
    auto spec = FunctionalSpec::oce(u);
    auto v = sll_certify(spec, full);
    EXPECT_EQ(v.method, Method::oce_asymptotic);
    expect_witness_holds(spec, v, full);
  }
}

TEST(SllCertify, ShortfallTailRatio) {
  auto full = DomainSpec::full();
  EXPECT_EQ(sll_certify(FunctionalSpec::shortfall(exponential_loss(2.0)), full).status, Status::sensitive);
  auto lin = FunctionalSpec::shortfall(linear_loss());
  expect_witness_holds(lin, sll_certify(lin, full), full);
}

TEST(SllCertify, PowerSShapeFamiliesAgree) {
  auto full = DomainSpec::full();
  for (auto [a, b] : {std::pair{0.3, 0.5}, {0.5, 0.5}, {0.5, 0.3}, {0.2, 0.9}, {0.9, 0.9}}) {
    UtilityFn u = power_s_utility(a, b);
    Status want = a < b ? Status::sensitive : Status::insensitive;
    EXPECT_EQ(sll_certify(FunctionalSpec::expected_utility(u), full).status, want) << a << "," << b;
    EXPECT_EQ(sll_certify(FunctionalSpec::classical_ce(u), full).status, want) << a << "," << b;
    EXPECT_EQ(sll_certify(FunctionalSpec::umean_ce(u), full).status, want) << a << "," << b;
  }
}

TEST(SllCertify, InsensitiveWitnessesReverify) {
  for (const auto& spec : analytic_specs()) {
    for (const auto& d : builtin_domains()) {
      auto v = sll_certify(spec, d);
      if (v.status == Status::insensitive) expect_witness_holds(spec, v, d);
    }
  }
}

TEST(SllCertify, JobsDoNotChangeTheVerdict) {
  for (const auto& spec : {FunctionalSpec::expected_utility(power_s_utility(0.5, 0.5)),
                           fixture_detail::concentration_counter_spec(EventMask({true, false}))}) {
    SllOptions one, four;
    four.jobs = 4;
    auto a = sll_certify(spec, DomainSpec::pure_losses(), one);
    auto b = sll_certify(spec, DomainSpec::pure_losses(), four);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.positions_tried, b.positions_tried);
    EXPECT_EQ(a.witness.has_value(), b.witness.has_value());
    if (a.witness && b.witness) EXPECT_EQ(a.witness->outcomes(), b.witness->outcomes());
  }
}

TEST(Battery, VaRESAndWorstCase) {
  auto v = localized_battery(FunctionalSpec::var(0.05));
  ASSERT_EQ(v.rows.size(), 4u);
  EXPECT_EQ(v.rows[0].status, Status::sensitive);
  EXPECT_EQ(v.rows[1].status, Status::insensitive);
  EXPECT_EQ(v.rows[2].status, Status::insensitive);
  EXPECT_EQ(v.rows[3].status, Status::insensitive);
  auto e = localized_battery(FunctionalSpec::es(0.05));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(e.rows[i].status, Status::sensitive);
  EXPECT_EQ(e.rows[3].status, Status::insensitive);
  for (const auto& row : localized_battery(FunctionalSpec::worst_case()).rows) EXPECT_EQ(row.status, Status::sensitive);
}

TEST(Battery, OrderingHolds) {
  for (const auto& spec : analytic_specs()) {
    auto b = localized_battery(spec);
    EXPECT_TRUE(b.ordering_holds) << spec.name();
    // expected => pure => sure on certified rows
    const auto &sure = b.rows[0], &pure = b.rows[1], &exp = b.rows[2];
    if (exp.certified && pure.certified && exp.status == Status::sensitive) EXPECT_EQ(pure.status, Status::sensitive);
    if (pure.certified && sure.certified && pure.status == Status::sensitive) EXPECT_EQ(sure.status, Status::sensitive);
  }
}

TEST(SignFlip, NegationGivesIdenticalVerdicts) {
  for (const auto& spec : {FunctionalSpec::var(0.05), FunctionalSpec::es(0.1), FunctionalSpec::entropic(1.0),
                           lvar_with_limit(0.02), fixture_detail::recession_risk_spec(0.1)}) {
    auto neg = FunctionalSpec::negation(spec);
    for (const auto& d : builtin_domains()) {
      SllOptions opt;
      opt.trials = 30;
      auto a = sll_certify(spec, d, opt), b = sll_certify(neg, d, opt);
      EXPECT_EQ(a.status, b.status) << spec.name() << " on " << d.name;
      EXPECT_EQ(a.method, b.method) << spec.name() << " on " << d.name;
      if (a.evidence && b.evidence) {
        ASSERT_EQ(a.evidence->sequence.size(), b.evidence->sequence.size());
        for (std::size_t k = 0; k < a.evidence->sequence.size(); ++k)
          EXPECT_EQ(a.evidence->sequence[k].value.value(), -b.evidence->sequence[k].value.value());
      }
    }
  }
}

TEST(Consistency, StarShapedPositionVerdictMatchesRecessionSign) {
  Rng rng(42);
  Sampler s = default_sampler(DomainSpec::full());
  for (const auto& spec : {FunctionalSpec::entropic(1.0), FunctionalSpec::es(0.1), lvar_with_limit(0.02),
                           FunctionalSpec::expected_utility(exponential_utility(1.0))}) {
    for (int t = 0; t < 100; ++t) {
      Position x = s(rng);
      auto pv = sll_position(spec, x);
      double rec = orientation(spec) * recession(spec, x).value.value();
      if (pv.outcome == PositionOutcome::certified_sensitive) EXPECT_GT(rec, -1e-9) << spec.name();
      else if (pv.outcome == PositionOutcome::certified_insensitive) EXPECT_LE(rec, 1e-9) << spec.name();
      if (rec > 1e-9) EXPECT_EQ(pv.outcome, PositionOutcome::certified_sensitive) << spec.name();
    }
  }
}

TEST(Consistency, CashAdditiveSensitiveSpecsRecoverWorstLoss) {
  Rng rng(42);
  Sampler s = default_sampler(DomainSpec::full());
  for (const auto& spec : {FunctionalSpec::entropic(1.0), FunctionalSpec::worst_case(), lvar_with_limit(0.0),
                           FunctionalSpec::adj_es(GProfile(0.0, {{0.1, 1.0}, {1.0, 0.0}}))}) {
    ASSERT_EQ(sll_certify(spec, DomainSpec::full()).status, Status::sensitive);
    for (int t = 0; t < 100; ++t) {
      Position x = s(rng);
      EXPECT_LT(std::abs(recession(spec, x).value.value() - ess_sup_neg(x)), 1e-6) << spec.name();
    }
  }
}

TEST(Consistency, RecessionAboveExpectedLossGivesExpectedSensitivity) {
  Rng rng(42);
  for (const auto& spec : {FunctionalSpec::es(0.3), FunctionalSpec::worst_case(), FunctionalSpec::entropic(1.0)}) {
    bool strict = true;
    for (int t = 0; t < 100; ++t) {
      Position x = random_nonconstant_position(rng);
      strict = strict && recession(spec, x).value.value() > -expectation(x) + 1e-9;
    }
    ASSERT_TRUE(strict) << spec.name();
    EXPECT_EQ(sll_certify(spec, DomainSpec::expected_losses()).status, Status::sensitive) << spec.name();
  }
}

TEST(Concentration, Examples) {
  Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    Position x = random_position(rng);
    EventMask a = random_event(rng, x.size());
    EXPECT_EQ(loss_concentration_check(FunctionalSpec::expectation(), x, a).outcome,
              ConcentrationOutcome::concentration_sensitive);
    auto w = loss_concentration_check(FunctionalSpec::worst_case(), x, a);
    ASSERT_EQ(w.outcome, ConcentrationOutcome::concentration_sensitive);
    EXPECT_GT(*w.lambda, ess_inf(restrict(x, a)) - 1e-12);
  }
  EventMask a({true, false});
  auto spec = fixture_detail::concentration_counter_spec(a);
  EXPECT_EQ(loss_concentration_check(spec, binary_position(0.5, 1.0, 0.0), a.complement()).outcome,
            ConcentrationOutcome::counterexample);
  EXPECT_THROW(loss_concentration_check(spec, binary_position(0.5, 1.0, 0.0), EventMask({false, false})),
               ParameterError);
}

TEST(Concentration, ExpectedSensitiveSpecsAreConcentrationSensitive) {
  Rng rng(42);
  for (const auto& spec : {FunctionalSpec::es(0.1), FunctionalSpec::worst_case(), FunctionalSpec::entropic(1.0)}) {
    ASSERT_EQ(sll_certify(spec, DomainSpec::expected_losses()).status, Status::sensitive);
    for (int t = 0; t < 50; ++t) {
      Position x = random_position(rng);
      EventMask a = random_event(rng, x.size());
      EXPECT_EQ(loss_concentration_check(spec, x, a).outcome, ConcentrationOutcome::concentration_sensitive)
          << spec.name();
    }
  }
}

TEST(Concentration, IndicatorFamiliesImplyPureSensitivity) {
  Rng rng(42);
  for (const auto& spec : {FunctionalSpec::es(0.1), FunctionalSpec::worst_case(), FunctionalSpec::entropic(1.0),
                           FunctionalSpec::var(0.05)}) {
    bool passes = true;
    for (int t = 0; t < 20; ++t) {
      Position zero = Position::constant(random_position(rng).space(), 0.0);
      EventMask a = random_event(rng, zero.size());
      passes = passes && loss_concentration_check(spec, zero, a).outcome == ConcentrationOutcome::concentration_sensitive;
    }
    if (passes) EXPECT_EQ(sll_certify(spec, DomainSpec::pure_losses()).status, Status::sensitive) << spec.name();
  }
}

TEST(RiskReduction, Examples) {
  Position x(make_space({0.04, 0.07, 0.3, 0.59}), {-1.0, 2.0, 1.0, 3.0});
  EXPECT_GT(risk_reduction_probe(FunctionalSpec::var(0.1), x).best_gap, 0.0);
  Position centred = binary_position(0.5, -1.0, 1.0);
  EXPECT_NEAR(risk_reduction_probe(FunctionalSpec::expectation(), centred).best_gap, 0.0, 1e-12);
  EXPECT_GT(risk_reduction_probe(FunctionalSpec::worst_case(), binary_position(0.3, -2.0, 1.0)).best_gap, 0.0);
}
