#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "losssense/functionals.hpp"
#include "losssense/random.hpp"

namespace losssense {

struct AxiomViolation {
  std::string property;
  int trial = -1;  // -1 for a directed probe
  Position x;
  std::optional<Position> y;
  double lambda = 0.0;
  double m = 0.0;
  double t = 0.0;
  double lhs = 0.0;  // risk-oriented left side of the failed relation
  double rhs = 0.0;
  std::string relation;
};

struct AxiomReport {
  int trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::map<std::string, bool> passed;         // property -> no violation found
  std::map<std::string, AxiomViolation> first; // first violation per property
  bool all_passed() const {
    for (const auto& [k, v] : passed)
      if (!v) return false;
    return true;
  }
};

namespace detail {

inline bool both_finite(double a, double b) { return std::isfinite(a) && std::isfinite(b); }

}  // namespace detail

/// Directed check of star-shapedness at one (X, lambda): R(lambda X) >= lambda R(X) in risk orientation.
inline std::optional<AxiomViolation> star_shaped_violation(const FunctionalSpec& spec, const Position& x,
                                                           double lambda, double tol = 1e-7) {
  double lhs = risk_value(spec, scale_add(x, lambda, 0.0)).value();
  double rhs = lambda * risk_value(spec, x).value();
  if (!detail::both_finite(lhs, rhs) || lhs >= rhs - tol) return std::nullopt;
  AxiomViolation v{"star_shaped", -1, x, std::nullopt, lambda, 0.0, 0.0, lhs, rhs, "R(lambda X) >= lambda R(X)"};
  return v;
}

/// Randomized falsification of the properties in `claims` (default: the declared flags).
///
/// Positions have 1-8 atoms with outcomes in [-10,10]; lambda in (1,20), m in [-5,5].
/// Every relation is checked in risk orientation within an absolute tolerance.
inline AxiomReport axiom_check(const FunctionalSpec& spec, int trials = 200, std::uint64_t seed = 42,
                               double tol = 1e-7, std::optional<AxiomFlags> claims = std::nullopt) {
  AxiomFlags c = claims.value_or(spec.flags());
  AxiomReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.tolerance = tol;
  Rng rng(seed);
  auto R = [&](const Position& p) { return risk_value(spec, p).value(); };

  auto note = [&](const std::string& prop, bool ok, AxiomViolation v) {
    auto it = rep.passed.find(prop);
    if (it == rep.passed.end()) it = rep.passed.emplace(prop, true).first;
    if (!ok && it->second) {
      it->second = false;
      v.property = prop;
      rep.first.emplace(prop, std::move(v));
    }
  };
  const std::pair<const char*, bool> claimed[] = {
      {"monotone", c.monotone},           {"normalized", c.normalized},
      {"cash_additive", c.cash_additive}, {"pos_homogeneous", c.pos_homogeneous},
      {"star_shaped", c.star_shaped},     {"convex_or_concave", c.convex_or_concave}};
  for (const auto& [name, on] : claimed)
    if (on) rep.passed.emplace(name, true);

  for (int trial = 0; trial < trials; ++trial) {
    Position x = random_position(rng, 1, 8);
    std::vector<double> bump(x.size());
    for (double& b : bump) b = rng.coin() ? 0.0 : rng.uniform(0.0, 5.0);
    Position y = x + Position(x.space(), bump);  // y >= x
    Position z = random_position_on(rng, x.space());
    double lambda = rng.uniform(1.0, 20.0);
    double m = rng.uniform(-5.0, 5.0);
    double t = rng.uniform(0.0, 1.0);
    double rx = R(x);

    if (c.monotone) {
      double ry = R(y);
      note("monotone", !(ry > rx + tol),
           {"", trial, x, y, 0.0, 0.0, 0.0, ry, rx, "R(Y) <= R(X) for Y >= X"});
    }
    if (c.normalized) {
      double r0 = R(Position::constant(x.space(), 0.0));
      note("normalized", std::abs(r0) <= tol,
           {"", trial, Position::constant(x.space(), 0.0), std::nullopt, 0.0, 0.0, 0.0, r0, 0.0, "R(0) = 0"});
    }
    if (c.cash_additive) {
      double lhs = R(x + m);
      double rhs = rx - m;
      bool ok = detail::both_finite(lhs, rhs) ? std::abs(lhs - rhs) <= tol : lhs == rhs;
      note("cash_additive", ok, {"", trial, x, std::nullopt, 0.0, m, 0.0, lhs, rhs, "R(X + m) = R(X) - m"});
    }
    if (c.pos_homogeneous) {
      double lhs = R(lambda * x);
      double rhs = lambda * rx;
      bool ok = detail::both_finite(lhs, rhs) ? std::abs(lhs - rhs) <= tol : lhs == rhs;
      note("pos_homogeneous", ok,
           {"", trial, x, std::nullopt, lambda, 0.0, 0.0, lhs, rhs, "R(lambda X) = lambda R(X)"});
    }
    if (c.star_shaped) {
      double lhs = R(lambda * x);
      double rhs = lambda * rx;
      bool ok = !detail::both_finite(lhs, rhs) || lhs >= rhs - tol;
      note("star_shaped", ok, {"", trial, x, std::nullopt, lambda, 0.0, 0.0, lhs, rhs, "R(lambda X) >= lambda R(X)"});
    }
    if (c.convex_or_concave) {
      double lhs = R(scale_add(x, t, 0.0) + scale_add(z, 1.0 - t, 0.0));
      double rhs = t * rx + (1.0 - t) * R(z);
      bool ok = !detail::both_finite(lhs, rhs) || lhs <= rhs + tol;
      note("convex_or_concave", ok,
           {"", trial, x, z, 0.0, 0.0, t, lhs, rhs, "R(tX + (1-t)Z) <= t R(X) + (1-t) R(Z)"});
    }
  }
  return rep;
}

}  // namespace losssense
