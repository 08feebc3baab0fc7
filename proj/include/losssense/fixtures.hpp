#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "losssense/axioms.hpp"
#include "losssense/functionals.hpp"
#include "losssense/random.hpp"
#include "losssense/recession.hpp"
#include "losssense/sensitivity.hpp"

namespace losssense {

struct ParamSpec {
  std::string name;
  double default_value;
  double lo;
  double hi;
  bool lo_inclusive = false;
  bool hi_inclusive = false;
  bool integer = false;
  std::string description;

  bool admits(double v) const {
    if (!std::isfinite(v)) return false;
    if (integer && v != std::floor(v)) return false;
    bool lo_ok = lo_inclusive ? v >= lo : v > lo;
    bool hi_ok = hi_inclusive ? v <= hi : v < hi;
    return lo_ok && hi_ok;
  }
};

using Params = std::map<std::string, double>;

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string relation;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
};

struct FixtureReport {
  std::string id;
  Params params;
  std::vector<AssertionResult> assertions;
  std::map<std::string, double> values;  // informative quantities computed along the way

  bool passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.passed; });
  }
  const AssertionResult* first_failure() const {
    for (const auto& a : assertions)
      if (!a.passed) return &a;
    return nullptr;
  }
};

/// Records named predicates with the values that decided them.
class Checker {
 public:
  explicit Checker(FixtureReport& rep) : rep_(rep) {}

  void close(const std::string& name, double lhs, double rhs, double tol) {
    bool ok = lhs == rhs || std::abs(lhs - rhs) <= tol;
    add(name, ok, "|lhs - rhs| <= tol", lhs, rhs, tol);
  }
  void equal(const std::string& name, double lhs, double rhs) { add(name, lhs == rhs, "lhs == rhs", lhs, rhs, 0.0); }
  void le(const std::string& name, double lhs, double rhs, double tol = 0.0) {
    add(name, lhs <= rhs + tol, "lhs <= rhs + tol", lhs, rhs, tol);
  }
  void gt(const std::string& name, double lhs, double rhs, double margin = 0.0) {
    add(name, lhs > rhs + margin, "lhs > rhs + tol", lhs, rhs, margin);
  }
  void truth(const std::string& name, bool cond) { add(name, cond, "holds", cond ? 1.0 : 0.0, 1.0, 0.0); }
  void value(const std::string& key, double v) { rep_.values[key] = v; }

 private:
  void add(const std::string& name, bool ok, const char* rel, double lhs, double rhs, double tol) {
    rep_.assertions.push_back({name, ok, rel, lhs, rhs, tol});
  }
  FixtureReport& rep_;
};

struct Fixture {
  std::string id;
  std::string description;
  std::string topic;
  std::vector<ParamSpec> params;
  std::function<std::optional<std::string>(const Params&)> constraint;  // cross-parameter validity
  std::function<void(const Params&, Checker&)> body;
};

namespace fixture_detail {

inline AxiomFlags flags(bool cash, bool homog, bool star, bool convex) {
  return {true, true, cash, homog, star, convex};
}

inline double native(const FunctionalSpec& s, const Position& x) { return evaluate(s, x).value(); }

/// ess sup over atoms of f(x_i) restricted to the event.
inline double ess_sup_on(const Position& x, const EventMask& a, double (*f)(double)) {
  double m = -kInf;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, a.contains(i) ? f(x.outcome(i)) : 0.0);
  return m;
}

inline FunctionalSpec recession_risk_spec(double alpha) {
  return FunctionalSpec::custom(
      Kind::risk, "min{ess sup(-X), VaR + 1}",
      [alpha](const Position& x) { return Extended::finite(std::min(ess_sup_neg(x), var(x, alpha) + 1.0)); },
      flags(true, false, false, false), [alpha](const Position& x) -> std::optional<RayCertificate> {
        double v = var(x, alpha);
        if (v < 0.0)
          return RayCertificate{-1.0 / v,
                                "R(lambda X) = min{lambda ess sup(-X), lambda VaR(X) + 1} <= 0 for "
                                "lambda >= 1/(-VaR(X))"};
        return std::nullopt;
      });
}

inline double mean_negative_part(const Position& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.prob(i) * std::min(x.outcome(i), 0.0);
  return s;
}

inline FunctionalSpec recession_utility_spec() {
  return FunctionalSpec::custom(
      Kind::utility, "max{E[X 1_{X<0}], E[X] - 1}",
      [](const Position& x) { return Extended::finite(std::max(mean_negative_part(x), expectation(x) - 1.0)); },
      flags(false, false, false, false), [](const Position& x) -> std::optional<RayCertificate> {
        double m = expectation(x);
        if (m > 0.0) return RayCertificate{1.0 / m, "U(lambda X) >= lambda E[X] - 1 >= 0 for lambda >= 1/E[X]"};
        return std::nullopt;
      });
}

inline UtilityFn capped_exponential_utility() {
  return UtilityFn({Piece{-kInf, 0.0, form::Constant{0.0}}, Piece{0.0, kInf, form::Exponential{1.0, 1.0, 0.0}}},
                   std::nullopt, "exp-gains-only");
}

inline UtilityFn kinked_linear_utility(double b) {
  return UtilityFn({Piece{-kInf, 0.0, form::Linear{1.0, 0.0}}, Piece{0.0, kInf, form::Linear{b, 0.0}}},
                   std::nullopt, "kinked-linear");
}

inline std::optional<std::string> none(const Params&) { return std::nullopt; }

// ---- individual scenes -----------------------------------------------------

inline void var_insensitive(const Params& p, Checker& c) {
  const double alpha = p.at("alpha"), pa = p.at("p_a");
  auto spec = FunctionalSpec::var(alpha);
  Position x = binary_position(pa, -1.0, 0.0);
  c.gt("P(X < 0) > 0", prob_negative(x), 0.0);
  c.equal("VaR(-1_A) = 0", var(x, alpha), 0.0);
  bool ray_zero = true;
  for (int k = 0; k <= 40; ++k) ray_zero = ray_zero && var(std::ldexp(1.0, k) * x, alpha) == 0.0;
  c.truth("VaR(lambda X) = 0 for lambda = 2^0..2^40", ray_zero);
  auto pv = sll_position(spec, x);
  c.truth("single-position check certifies insensitivity", pv.outcome == PositionOutcome::certified_insensitive);
}

inline void es_insensitive(const Params& p, Checker& c) {
  const double alpha = p.at("alpha"), pa = p.at("p_a"), n = p.at("n");
  Position x = binary_position(pa, -1.0, n);
  const double closed = (pa - n * (alpha - pa)) / alpha;
  const double v = es(x, alpha);
  c.value("closed_form", closed);
  c.close("ES matches (1/alpha)[p - n(alpha - p)]", v, closed, 1e-12 * std::max(1.0, n));
  c.le("ES(X) <= 0", v, 0.0, 1e-12 * std::max(1.0, n));
  auto pv = sll_position(FunctionalSpec::es(alpha), x);
  c.truth("single-position check certifies insensitivity", pv.outcome == PositionOutcome::certified_insensitive);
}

inline void entropic_sll(const Params&, Checker& c) {
  auto eu = FunctionalSpec::expected_utility(exponential_utility(1.0));
  auto ent = FunctionalSpec::entropic(1.0);
  Position y = binary_position(0.5, 1.0, -1.0 / 3.0);
  const double closed = 1.0 - 0.5 * (std::exp(-1.0) + std::exp(1.0 / 3.0));
  const double v = native(eu, y);
  c.value("expected_utility_at_Y", v);
  c.close("E_u(Y) matches 1 - (e^-1 + e^(1/3))/2", v, closed, 1e-10);
  c.gt("E_u(Y) > 0", v, 0.0);
  c.truth("expected utility is not sensitive to losses at Y", !sensitive_to_losses(eu, y));
  c.le("E_u(64 Y) < -1e6", native(eu, 64.0 * y), -1e6);
  double worst = 0.0;
  for (int k = -3; k <= 5; ++k) {
    Position z = std::ldexp(1.0, k) * y;
    double lhs = native(ent, z), rhs = std::log(1.0 - native(eu, z));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  c.le("entropic risk equals log(1 - E_u) on lambda Y", worst, 1e-10);
  c.truth("entropic risk is sensitive to large losses",
          sll_certify(ent, DomainSpec::full()).status == Status::sensitive);
  c.truth("expected exponential utility is sensitive to large losses",
          sll_certify(eu, DomainSpec::full()).status == Status::sensitive);
}

inline void recession_risk(const Params& p, Checker& c) {
  const double alpha = p.at("alpha"), pa = p.at("p_a");
  auto spec = recession_risk_spec(alpha);
  Position x = binary_position(pa, -1.0, 1.0);  // 1_{A^c} - 1_A
  bool identity = true;
  for (int k = -4; k <= 20; ++k) {
    double l = std::ldexp(1.0, k);
    identity = identity && native(spec, l * x) == std::min(l, 1.0 - l);
  }
  c.truth("R(lambda X) = min{lambda, 1 - lambda}", identity);
  c.equal("R(2X) = -1", native(spec, 2.0 * x), -1.0);
  c.equal("2 R(X) = 0", 2.0 * native(spec, x), 0.0);
  auto viol = star_shaped_violation(spec, x, 2.0, 0.0);
  c.truth("star-shaped check fails at lambda = 2", viol.has_value());
  Position ind = binary_position(pa, -1.0, 0.0);  // -1_A
  bool minus_ind = true;
  for (int k = -4; k <= 20; ++k) {
    double l = std::ldexp(1.0, k);
    minus_ind = minus_ind && native(spec, l * ind) == std::min(l, 1.0);
  }
  c.truth("R(-lambda 1_A) = min{lambda, 1}", minus_ind);
  c.truth("star-shaped check also fails at -1_A", star_shaped_violation(spec, ind, 2.0, 0.0).has_value());
  auto pv = sll_position(spec, x);
  c.truth("ray identity certifies insensitivity", pv.outcome == PositionOutcome::certified_insensitive);
  auto rec = recession(spec, x);
  c.close("recession equals ess sup(-X)", rec.value.value(), ess_sup_neg(x), 1e-9);
}

inline void recession_utility(const Params& p, Checker& c) {
  const double pa = p.at("p_a");
  auto spec = recession_utility_spec();
  Position x = binary_position(pa, -1.0, 1.0);
  double worst = 0.0;
  for (int k = -4; k <= 20; ++k) {
    double l = std::ldexp(1.0, k);
    double closed = std::max(-l * pa, l * (1.0 - 2.0 * pa) - 1.0);
    worst = std::max(worst, std::abs(native(spec, l * x) - closed) / std::max(1.0, l));
  }
  c.le("U(lambda X) = max{-lambda p, lambda(1 - 2p) - 1}", worst, 1e-12);
  c.close("U(2X) = 1 - 4p", native(spec, 2.0 * x), 1.0 - 4.0 * pa, 1e-12);
  c.close("2 U(X) = -2p", 2.0 * native(spec, x), -2.0 * pa, 1e-12);
  c.truth("star-shaped check fails at lambda = 2", star_shaped_violation(spec, x, 2.0, 0.0).has_value());
  const double from = 1.0 / (1.0 - 2.0 * pa);
  bool accept = true;
  for (double l = from; l <= from * 1e6; l *= 3.0) accept = accept && native(spec, l * x) >= -1e-12 * l;
  c.truth("U(lambda X) >= 0 for lambda >= 1/(1 - 2p)", accept);
  auto pv = sll_position(spec, x);
  c.truth("ray identity certifies insensitivity", pv.outcome == PositionOutcome::certified_insensitive);
  auto rec = recession(spec, x);
  c.close("recession equals E[X 1_{X<0}]", rec.value.value(), -pa, 1e-9);
}

inline void var_reduction(const Params& p, Checker& c) {
  const double alpha = p.at("alpha");
  auto spec = FunctionalSpec::var(alpha);
  Position x(make_space({0.04, 0.07, 0.3, 0.59}), {-1.0, 2.0, 1.0, 3.0});
  EventMask b({false, true, false, false});
  Position y = -(1.0 + sup_norm(x)) * indicator(x.space(), b);
  c.le("P(X < 0) <= alpha", prob_negative(x), alpha);
  c.truth("B lies in {X >= 0}", x.outcome(1) >= 0.0);
  c.truth("alpha - P(X < 0) < P(B) <= alpha",
          alpha - prob_negative(x) < b.probability(*x.space()) && b.probability(*x.space()) <= alpha);
  c.equal("VaR(Y) = 0", var(y, alpha), 0.0);
  c.gt("VaR(X + Y) > 0", var(x + y, alpha), 0.0);
  auto probe = risk_reduction_probe(spec, x);
  c.value("probe_best_gap", probe.best_gap);
  c.gt("reduction probe finds a positive gap", probe.best_gap, 0.0);
  c.truth("VaR is insensitive to large losses",
          sll_certify(spec, DomainSpec::full()).status == Status::insensitive);
}

inline void star_utility_probe(const Params& p, Checker& c) {
  const double eps = p.at("eps");
  UtilityFn u = capped_exponential_utility();
  auto spec = FunctionalSpec::expected_utility(u);
  Position x(make_space({0.2, 0.2, 0.3, 0.3}), {-2.0, -0.5, 1.0, 3.0});
  const double norm = sup_norm(x);
  double p_le = 0.0, p_pos = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.outcome(i) <= -eps) p_le += x.prob(i);
    if (x.outcome(i) > 0.0) p_pos += x.prob(i);
  }
  auto bound = [&](double n) {
    return p_le * std::exp(-norm) * std::expm1(eps) - p_pos * std::exp(-n) * (1.0 - std::exp(-norm));
  };
  // smallest integer n making the displayed lower bound positive
  const double target = p_le * std::exp(-norm) * std::expm1(eps) / (p_pos * (1.0 - std::exp(-norm)));
  const double n = std::max(1.0, std::floor(-std::log(target)) + 1.0);
  c.value("n", n);
  c.truth("utility is negatively star-shaped", u.flags().neg_star_shaped);
  c.truth("expected utility is flagged star-shaped", spec.flags().star_shaped);
  c.gt("lower bound positive at n", bound(n), 0.0);
  if (n > 1.0) c.le("lower bound non-positive at n - 1", bound(n - 1.0), 0.0);
  std::vector<double> yv(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) yv[i] = norm + (x.outcome(i) > 0.0 ? n - x.outcome(i) : 0.0);
  Position y(x.space(), yv);
  const double gap = native(spec, y) - native(spec, x + y);
  c.value("gap", gap);
  c.le("E_u(Y_n) - E_u(X + Y_n) >= bound", bound(n), gap, 1e-12);
  c.gt("E_u(X + Y_n) < E_u(Y_n)", gap, 0.0);
  c.truth("expected utility is insensitive to large losses",
          sll_certify(spec, DomainSpec::full()).status == Status::insensitive);
}

inline FunctionalSpec induced_fails_spec(const EventMask& a) {
  return FunctionalSpec::custom(
      Kind::risk, "inf on {E[X 1_A] <= 0}, 0 elsewhere",
      [a](const Position& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          if (a.contains(i)) s += x.prob(i) * x.outcome(i);
        return s <= 0.0 ? Extended::plus_infinity() : Extended::finite(0.0);
      },
      {true, false, false, true, true, true});
}

inline void induced_fails(const Params& p, Checker& c) {
  const double pa = p.at("p_a");
  auto space = make_space({pa / 2.0, pa / 2.0, (1.0 - pa) / 2.0, (1.0 - pa) / 2.0});
  EventMask a({true, true, false, false});
  auto spec = induced_fails_spec(a);
  auto cond_loss = [&](const Position& z) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      if (a.contains(i)) s -= z.prob(i) * z.outcome(i);
    return s / pa;
  };
  Position x(space, {0.0, 0.0, -1.0, -1.0});  // -1_{A^c}
  c.truth("R(0) = inf (not normalized)", evaluate(spec, Position::constant(space, 0.0)).is_plus_infinity());
  bool infinite = true;
  for (int k = 0; k <= 20; ++k) infinite = infinite && evaluate(spec, std::ldexp(1.0, k) * x).is_plus_infinity();
  c.truth("R(lambda X) = inf on the ray", infinite);
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    double l = std::ldexp(1.0, k);
    worst = std::max(worst, std::abs(induced_cash_additive(spec, l * x).value()) / l);
  }
  c.le("induced functional vanishes along lambda X", worst, 1e-8);
  Position z(space, {1.0, -3.0, 2.0, -5.0});
  c.close("induced functional equals E[-X | A]", induced_cash_additive(spec, z).value(), cond_loss(z), 1e-8);
  c.truth("acceptance set induces a risk functional", is_risk_functional_induced(spec, 50).holds);
}

inline void var_sure_sensitive(const Params& p, Checker& c) {
  const double alpha = p.at("alpha");
  auto spec = FunctionalSpec::var(alpha);
  Rng rng(42);
  Sampler s = default_sampler(DomainSpec::sure_losses());
  double min_var = kInf;
  for (int i = 0; i < 50; ++i) min_var = std::min(min_var, var(s(rng), alpha));
  c.gt("VaR(X) > 0 on sampled sure losses", min_var, 0.0);
  c.truth("sensitive on sure losses", sll_certify(spec, DomainSpec::sure_losses()).status == Status::sensitive);
  c.truth("insensitive on pure losses",
          sll_certify(spec, DomainSpec::pure_losses()).status == Status::insensitive);
}

inline void sqrt_sshape(const Params&, Checker& c) {
  auto spec = FunctionalSpec::expected_utility(power_s_utility(0.5, 0.5));
  Position x(make_space({0.1, 0.1, 0.4, 0.4}), {-2.0, 2.0, -0.5, 0.5});
  c.equal("E[X] = 0", expectation(x), 0.0);
  bool zero = true;
  for (int k = 0; k <= 40; ++k) zero = zero && native(spec, std::ldexp(1.0, k) * x) == 0.0;
  c.truth("E_u(lambda X) = 0 for lambda = 2^0..2^40", zero);
  c.truth("X lies in the expected-loss domain", DomainSpec::expected_losses().contains(x) && has_losses(x));
  c.truth("sensitive on pure losses",
          sll_certify(spec, DomainSpec::pure_losses()).status == Status::sensitive);
}

inline FunctionalSpec pure_not_expected_spec(double pa) {
  return FunctionalSpec::custom(
      Kind::risk, "weighted expected loss",
      [pa](const Position& x) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) (i == 0 ? a : b) -= x.prob(i) * x.outcome(i);
        return Extended::finite((2.0 - 1.0 / pa) * a + 2.0 * b);
      },
      flags(true, true, true, true));
}

inline void pure_not_expected(const Params& p, Checker& c) {
  const double pa = p.at("p_a");
  auto spec = pure_not_expected_spec(pa);
  Position y = binary_position(pa, -1.0, pa / (1.0 - pa));
  c.close("R(Y) = -1", native(spec, y), -1.0, 1e-12);
  c.close("E[-Y] = 0", expectation(-y), 0.0, 1e-12);
  auto rec = recession(spec, y);
  c.close("recession at Y equals R(Y)", rec.value.value(), native(spec, y), 1e-12);
  c.truth("sensitive on pure losses",
          sll_certify(spec, DomainSpec::pure_losses()).status == Status::sensitive);
  c.truth("insensitive on expected losses",
          sll_certify(spec, DomainSpec::expected_losses()).status == Status::insensitive);
}

inline void es_strict_bound(const Params& p, Checker& c) {
  const double alpha = p.at("alpha");
  Rng rng(42);
  double min_gap = kInf, worst_chain = -kInf;
  for (int i = 0; i < 200; ++i) {
    Position x = random_nonconstant_position(rng);
    double e = es(x, alpha), v = var(x, alpha), m = expectation(-x);
    min_gap = std::min(min_gap, e - m);
    double mid = alpha * e + (1.0 - alpha) * v;
    worst_chain = std::max({worst_chain, m - mid, mid - e});
  }
  c.value("min_gap", min_gap);
  c.gt("ES(X) - E[-X] > 1e-9 on 200 nonconstant X", min_gap, 1e-9);
  c.le("E[-X] <= alpha ES + (1 - alpha) VaR <= ES", worst_chain, 0.0, 1e-12);
  auto v = sll_certify(FunctionalSpec::es(alpha), DomainSpec::expected_losses());
  c.truth("sensitive on expected losses via the strict bound",
          v.status == Status::sensitive && v.method == Method::strict_expectation_bound);
}

inline FunctionalSpec concentration_counter_spec(const EventMask& a) {
  return FunctionalSpec::custom(
      Kind::risk, "min{ess sup(-X), ess sup((1 - X) 1_A)}",
      [a](const Position& x) {
        return Extended::finite(std::min(ess_sup_neg(x), ess_sup_on(x, a, [](double v) { return 1.0 - v; })));
      },
      flags(false, false, false, false));
}

inline void concentration_counter(const Params& p, Checker& c) {
  const double pa = p.at("p_a");
  EventMask a({true, false});
  auto spec = concentration_counter_spec(a);
  Position x = binary_position(pa, 1.0, 0.0);  // 1_A
  Position ind_ac = indicator(x.space(), a.complement());
  bool zero = true;
  for (double l : {0.01, 0.25, 0.5, 0.75, 0.99}) zero = zero && native(spec, x - l * ind_ac) == 0.0;
  c.truth("R(X - lambda 1_{A^c}) = 0 for lambda in (0,1)", zero);
  auto res = loss_concentration_check(spec, x, a.complement());
  c.truth("concentration check returns a counterexample", res.outcome == ConcentrationOutcome::counterexample);
  c.truth("sensitive on pure losses",
          sll_certify(spec, DomainSpec::pure_losses()).status == Status::sensitive);
}

inline void concentration_linear(const Params&, Checker& c) {
  auto spec = FunctionalSpec::expectation();
  Rng rng(42);
  bool all = true;
  for (int i = 0; i < 20; ++i) {
    Position x = random_position(rng);
    EventMask a = random_event(rng, x.size());
    all = all && loss_concentration_check(spec, x, a).outcome == ConcentrationOutcome::concentration_sensitive;
  }
  c.truth("E[-X] is concentration sensitive on 20 random (X, A)", all);
  c.truth("E[-X] is insensitive on expected losses",
          sll_certify(spec, DomainSpec::expected_losses()).status == Status::insensitive);
}

inline void power_sshape(const Params& p, Checker& c) {
  const double a = p.at("alpha"), b = p.at("beta");
  UtilityFn u = power_s_utility(a, b);
  const Status want = a < b ? Status::sensitive : Status::insensitive;
  const DomainSpec full = DomainSpec::full();
  auto s1 = sll_certify(FunctionalSpec::expected_utility(u), full).status;
  auto s2 = sll_certify(FunctionalSpec::classical_ce(u), full).status;
  auto s3 = sll_certify(FunctionalSpec::umean_ce(u), full).status;
  c.truth("expected utility verdict matches alpha < beta", s1 == want);
  c.truth("classical certainty equivalent agrees", s2 == want);
  c.truth("u-mean certainty equivalent agrees", s3 == want);
  c.truth("linear utility gives an insensitive expected utility",
          sll_certify(FunctionalSpec::expected_utility(linear_utility()), full).status == Status::insensitive);
}

inline void oce_gap(const Params& p, Checker& c) {
  const double a = p.at("a"), beta = p.at("beta");
  UtilityFn u = oce_remark_utility(a, beta);
  auto o = FunctionalSpec::oce(u);
  auto e = FunctionalSpec::expected_utility(u);
  auto vo = sll_certify(o, DomainSpec::full());
  c.truth("OCE is insensitive", vo.status == Status::insensitive && vo.method == Method::oce_asymptotic);
  c.truth("expected utility is sensitive", sll_certify(e, DomainSpec::full()).status == Status::sensitive);
  if (vo.witness) {
    const double pa = vo.witness->prob(0);
    bool ok = true;
    for (int k = 0; k <= 20; ++k) {
      double l = std::ldexp(1.0, k);
      double h = l + pa * u(-2.0 * l);
      ok = ok && h >= 0.0 && native(o, l * *vo.witness) >= h - 1e-8 * l;
    }
    c.truth("OCE(lambda_n X) >= lambda_n + P(A) u(-2 lambda_n) >= 0 for k <= 20", ok);
  }
  Rng rng(42);
  double worst = -kInf;
  for (int i = 0; i < 200; ++i) {
    Position x = random_position(rng);
    double vo_x = native(o, x), tol = 1e-8 * std::max(1.0, sup_norm(x));
    worst = std::max({worst, vo_x - expectation(x) - tol, native(e, x) - vo_x - tol});
  }
  c.le("E[X] >= OCE >= E_u on 200 random positions", worst, 0.0);
}

inline void oce_witness_a(const Params& p, Checker& c) {
  const double beta = p.at("beta"), shrink = p.at("shrink");
  UtilityFn u = oce_remark_utility(0.5, beta);
  auto o = FunctionalSpec::oce(u);
  const double slope = u.slope_at_minus_infinity();
  const double pa = shrink / (2.0 * (slope + 1.0));
  c.value("P(A)", pa);
  Position x = binary_position(pa, -1.0, 1.0);
  c.gt("P(X < 0) > 0", prob_negative(x), 0.0);
  bool tail = true, h_ok = true, oce_ok = true;
  for (int k = 0; k <= 20; ++k) {
    double l = std::ldexp(1.0, k);
    tail = tail && u(-2.0 * l) >= -2.0 * l * (slope + 1.0);
    double h = l + pa * u(-2.0 * l);
    h_ok = h_ok && oce_objective(u, l * x, l) >= h - 1e-12 * l && h >= 0.0;
    oce_ok = oce_ok && native(o, l * x) >= -1e-8 * l;
  }
  c.truth("u(-2 lambda_n) >= -2 lambda_n (a + 1)", tail);
  c.truth("lambda_n + P(A) u(-2 lambda_n) >= 0", h_ok);
  c.truth("OCE(lambda_n X) >= 0 for k <= 20", oce_ok);
}

inline void oce_witness_b(const Params& p, Checker& c) {
  const double b = p.at("b"), pb_scale = p.at("p_b_scale");
  UtilityFn u = kinked_linear_utility(b);
  auto o = FunctionalSpec::oce(u);
  const double slope = u.slope_at_plus_infinity();
  c.close("slope at +inf equals b", slope, b, 1e-12);
  const double pb = std::min(pb_scale * 2.0 * slope / 3.0, 1.0 - 1e-9);
  c.value("P(B)", pb);
  const double top = 2.0 / (slope * slope);
  Position x = binary_position(pb, top - 1.0, -1.0);  // -1_{B^c} + (2/b^2 - 1) 1_B
  c.gt("P(X < 0) > 0", prob_negative(x), 0.0);
  bool tail = true, h_ok = true, oce_ok = true;
  for (int k = 0; k <= 20; ++k) {
    double l = std::ldexp(1.0, k);
    tail = tail && u(l * top) >= l * 1.5 / slope - 1e-12 * l;
    double h = -l + pb * u(l * top);
    h_ok = h_ok && oce_objective(u, l * x, -l) >= h - 1e-12 * l && h >= 0.0;
    oce_ok = oce_ok && native(o, l * x) >= -1e-8 * l;
  }
  c.truth("u(lambda_n 2/b^2) >= lambda_n 3/(2b)", tail);
  c.truth("-lambda_n + P(B) u(lambda_n 2/b^2) >= 0", h_ok);
  c.truth("OCE(lambda_n X) >= 0 for k <= 20", oce_ok);
}

inline ParamSpec prob(const std::string& name, double def, double hi = 1.0, bool hi_incl = false,
                      const std::string& what = "probability of the event A") {
  return {name, def, 0.0, hi, false, hi_incl, false, what};
}

}  // namespace fixture_detail

inline const std::vector<Fixture>& fixture_registry() {
  using namespace fixture_detail;
  static const std::vector<Fixture> reg = {
      {"var-insensitive", "VaR ignores a loss on an event of probability at most alpha",
       "Value at Risk and Expected Shortfall on the full space, VaR case",
       {{"alpha", 0.1, 0.0, 1.0, false, false, false, "VaR level"}, prob("p_a", 0.05)},
       [](const Params& p) -> std::optional<std::string> {
         if (p.at("p_a") > p.at("alpha")) return "p_a must not exceed alpha";
         return std::nullopt;
       },
       var_insensitive},
      {"es-insensitive", "ES vanishes on -1_A + n 1_{A^c} once n >= P(A)/(alpha - P(A))",
       "Value at Risk and Expected Shortfall on the full space, ES case",
       {{"alpha", 0.1, 0.0, 1.0, false, false, false, "ES level"}, prob("p_a", 0.05),
        {"n", 1.0, 1.0, 1e6, true, true, true, "gain on A^c"}},
       [](const Params& p) -> std::optional<std::string> {
         double a = p.at("alpha"), q = p.at("p_a");
         if (q >= a) return "p_a must be below alpha";
         if (p.at("n") < q / (a - q)) return "n must be at least p_a / (alpha - p_a)";
         return std::nullopt;
       },
       es_insensitive},
      {"entropic-sll", "exponential utility: not sensitive to losses but sensitive to large losses",
       "sensitivity to losses versus large losses, exponential utility and entropic risk", {}, none, entropic_sll},
      {"recession-risk", "min{ess sup(-X), VaR + 1}: recession sensitive, functional not",
       "recession functional example, risk side",
       {{"alpha", 0.1, 0.0, 1.0, false, false, false, "VaR level"}, prob("p_a", 0.05)},
       [](const Params& p) -> std::optional<std::string> {
         if (p.at("p_a") >= p.at("alpha")) return "p_a must be below alpha";
         return std::nullopt;
       },
       recession_risk},
      {"recession-utility", "max{E[X 1_{X<0}], E[X] - 1}: recession sensitive, functional not",
       "recession functional example, utility side", {prob("p_a", 0.1, 0.25)}, none, recession_utility},
      {"var-reduction", "VaR: adding a zero-risk Y makes X + Y unacceptable",
       "risk reduction under VaR after the star-shaped characterization",
       {{"alpha", 0.1, 0.07, 0.11, true, false, false, "VaR level; keeps P(B) = 0.07 in (alpha - 0.04, alpha]"}},
       none, var_reduction},
      {"star-utility-probe", "utility flat on losses: Y_n with n from the displayed bound gives E_u(X+Y) < E_u(Y)",
       "risk reduction for a star-shaped expected utility",
       {{"eps", 1.0, 0.0, 2.0, false, true, false, "loss level with P(X <= -eps) > 0"}}, none,
       star_utility_probe},
      {"induced-fails", "acceptance-set induced functional E[-X | A] loses sensitivity",
       "functionals induced by acceptance sets", {prob("p_a", 0.3)}, none, induced_fails},
      {"var-sure-sensitive", "VaR is sensitive to large sure losses but not pure losses",
       "localized sensitivity of VaR", {{"alpha", 0.05, 0.0, 1.0, false, false, false, "VaR level"}}, none,
       var_sure_sensitive},
      {"sqrt-sshape", "square-root S-shape: symmetric X keeps E_u(lambda X) = 0",
       "localized sensitivity of an S-shaped expected utility", {}, none, sqrt_sshape},
      {"pure-not-expected", "positively homogeneous convex cash-additive R sensitive to pure but not expected losses",
       "localized sensitivity: pure versus expected losses", {prob("p_a", 0.7)},
       [](const Params& p) -> std::optional<std::string> {
         if (p.at("p_a") <= 0.5) return "p_a must exceed 1/2";
         return std::nullopt;
       },
       pure_not_expected},
      {"es-strict-bound", "ES is strictly expectation bounded", "strict expectation bound of Expected Shortfall",
       {{"alpha", 0.1, 0.0, 1.0, false, false, false, "ES level"}}, none, es_strict_bound},
      {"concentration-counter", "sensitive to pure losses but not to loss concentrations",
       "loss concentrations, counterexample", {prob("p_a", 0.5)}, none, concentration_counter},
      {"concentration-linear", "E[-X] is concentration sensitive but not expected-loss sensitive",
       "loss concentrations, linear functional", {}, none, concentration_linear},
      {"power-sshape", "power S-shape: sensitive iff gain exponent < loss exponent",
       "tail ratio criterion for expected utility and certainty equivalents",
       {{"alpha", 0.3, 0.0, 1.0, false, false, false, "gain exponent"},
        {"beta", 0.5, 0.0, 1.0, false, false, false, "loss exponent"}},
       none, power_sshape},
      {"oce-gap", "OCE insensitive while expected utility with the same u is sensitive",
       "optimized certainty equivalent versus expected utility",
       {{"a", 0.5, 0.0, 1.0, false, false, false, "gain exponent above 1"},
        {"beta", 2.0, 1.0, 100.0, true, true, false, "loss slope"}},
       none, oce_gap},
      {"oce-witness-a", "finite slope at -inf: X = -1_A + 1_{A^c} keeps OCE(lambda X) >= 0",
       "OCE characterization, finite loss slope witness",
       {{"beta", 2.0, 1.0, 100.0, true, true, false, "loss slope"},
        {"shrink", 1.0, 0.0, 1.0, false, true, false, "P(A) as a fraction of 1/(2(a+1))"}},
       none, oce_witness_a},
      {"oce-witness-b", "positive slope at +inf: X = -1_{B^c} + (2/b^2 - 1) 1_B keeps OCE(lambda X) >= 0",
       "OCE characterization, positive gain slope witness",
       {{"b", 0.5, 0.0, 1.0, false, true, false, "gain slope"},
        {"p_b_scale", 1.0, 1.0, 1.4, true, true, false, "P(B) as a multiple of 2b/3, capped below 1"}},
       none, oce_witness_b},
  };
  return reg;
}

inline const Fixture& find_fixture(const std::string& id) {
  for (const auto& f : fixture_registry())
    if (f.id == id) return f;
  throw ParameterError("unknown fixture id '" + id + "'");
}

/// Defaults overlaid with `overrides`; throws on unknown names or values outside the validity region.
inline Params resolve_params(const Fixture& f, const Params& overrides = {}) {
  Params p;
  for (const auto& s : f.params) p[s.name] = s.default_value;
  for (const auto& [k, v] : overrides) {
    auto it = std::find_if(f.params.begin(), f.params.end(), [&](const ParamSpec& s) { return s.name == k; });
    if (it == f.params.end()) throw ParameterError("fixture '" + f.id + "' has no parameter '" + k + "'");
    if (!it->admits(v)) throw ParameterError("parameter '" + k + "' outside its validity region");
    p[k] = v;
  }
  if (auto why = f.constraint(p)) throw ParameterError("fixture '" + f.id + "': " + *why);
  return p;
}

inline FixtureReport run_fixture(const std::string& id, const Params& overrides = {}) {
  const Fixture& f = find_fixture(id);
  FixtureReport rep;
  rep.id = id;
  rep.params = resolve_params(f, overrides);
  Checker c(rep);
  f.body(rep.params, c);
  return rep;
}

/// Random parameters from the validity region (rejection on cross constraints).
inline Params sample_params(const Fixture& f, Rng& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Params p;
    for (const auto& s : f.params) {
      double hi = std::min(s.hi, s.lo + 1e3);
      double v = rng.uniform(s.lo, hi);
      if (s.integer) v = std::round(v);
      if (!s.admits(v)) v = s.default_value;
      p[s.name] = v;
    }
    if (!f.constraint(p)) return p;
  }
  return resolve_params(f);
}

}  // namespace losssense
