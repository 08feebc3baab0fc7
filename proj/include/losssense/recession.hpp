#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "losssense/functionals.hpp"
#include "losssense/random.hpp"

namespace losssense {

enum class RecessionMode { analytic, numeric_converged, numeric_lower_bound };

inline const char* mode_name(RecessionMode m) {
  switch (m) {
    case RecessionMode::analytic: return "analytic";
    case RecessionMode::numeric_converged: return "numeric_converged";
    default: return "numeric_lower_bound";
  }
}

struct RatioPoint {
  double lambda;
  Extended ratio;  // F(lambda X) / lambda in the functional's own orientation
};

struct RecessionEstimate {
  Extended value;
  RecessionMode mode = RecessionMode::analytic;
  double lambda_max = 0.0;
  std::vector<RatioPoint> ratio_trace;
};

struct RecessionOptions {
  int max_exponent = 40;     // lambda runs over 2^0 .. 2^max_exponent
  double stop_change = 1e-7; // convergence threshold between successive ratios
};

namespace detail {

// Closed-form recession value in native orientation, when one is proved.
inline std::optional<Extended> analytic_recession(const FunctionalSpec& spec, const Position& x) {
  if (spec.flags().pos_homogeneous) return evaluate(spec, x);
  if (const auto* v = spec.as<variant::LVaR>()) {
    double a = v->profile.alpha_inf();
    return Extended::finite(a > 0.0 ? var(x, a) : ess_sup_neg(x));
  }
  if (const auto* v = spec.as<variant::AdjES>()) {
    double p = v->g.inf_prefix();
    return Extended::finite(p == 0.0 ? ess_sup_neg(x) : es(x, p));
  }
  if (const auto* v = spec.as<variant::Negation>()) {
    if (auto inner = analytic_recession(*v->inner, x)) return -*inner;
  }
  return std::nullopt;
}

}  // namespace detail

/// sup over lambda > 0 of F(lambda X) / lambda (risk kind); inf for utility kind.
///
/// Star-shaped specs have monotone ratios, so the doubling schedule from
/// lambda = 1 upwards gives a lower bound that is reported as converged once
/// 8 successive ratios agree. Otherwise the schedule runs over 2^-K .. 2^K and
/// the supremum of the trace is only a lower bound.
inline RecessionEstimate recession(const FunctionalSpec& spec, const Position& x, RecessionOptions opt = {}) {
  RecessionEstimate est;
  est.lambda_max = std::ldexp(1.0, opt.max_exponent);
  if (auto a = detail::analytic_recession(spec, x)) {
    est.value = *a;
    est.mode = RecessionMode::analytic;
    return est;
  }
  const double sign = orientation(spec);
  const bool star = spec.flags().star_shaped;
  const int k0 = star ? 0 : -opt.max_exponent;
  double best = -kInf;  // risk orientation
  double prev = std::nan("");
  int flat = 0;
  constexpr int kFlatSteps = 8;
  est.mode = RecessionMode::numeric_lower_bound;
  for (int k = k0; k <= opt.max_exponent; ++k) {
    double lambda = std::ldexp(1.0, k);
    Extended r = risk_value(spec, scale_add(x, lambda, 0.0));
    Extended ratio = r.divided(lambda);
    est.ratio_trace.push_back({lambda, sign > 0 ? ratio : -ratio});
    if (ratio.is_plus_infinity()) {
      // the supremum is attained at this lambda
      est.value = sign > 0 ? Extended::plus_infinity() : Extended::minus_infinity();
      est.mode = RecessionMode::analytic;
      return est;
    }
    best = std::max(best, ratio.value());
    // a ratio can sit flat and then drop (a utility that hits -inf past some loss), so one
    // small step is not enough
    flat = k > k0 && std::abs(ratio.value() - prev) < opt.stop_change ? flat + 1 : 0;
    if (star && flat >= kFlatSteps) {
      est.mode = RecessionMode::numeric_converged;
      break;
    }
    prev = ratio.value();
  }
  est.value = Extended::from_double(sign * best);
  return est;
}

/// inf{m : R(X + m) <= 0} (risk kind); sup{m : U(X - m) >= 0} for utility kind.
inline Extended induced_cash_additive(const FunctionalSpec& spec, const Position& x) {
  auto accepted = [&](double m) { return risk_value(spec, scale_add(x, 1.0, m)).value() <= 0.0; };
  auto t = locate_threshold(accepted, search_limit(x));
  Extended v;
  if (t.kind == Threshold::Kind::always_true) v = Extended::minus_infinity();
  else if (t.kind == Threshold::Kind::never_true) v = Extended::plus_infinity();
  else v = Extended::finite(t.above);
  return spec.kind() == Kind::risk ? v : -v;
}

struct InducedCheck {
  bool holds = true;
  std::optional<double> witness_m;        // R(m) <= 0 for this m < 0
  std::optional<Position> witness_x;      // R(X + m) <= 0 for every m tried
  int samples = 0;
};

/// Randomized check that the acceptance set of spec induces a risk functional:
/// R(m) > 0 for m < 0, and every X becomes unacceptable after withdrawing enough cash.
inline InducedCheck is_risk_functional_induced(const FunctionalSpec& spec, int samples = 100,
                                               std::uint64_t seed = 42) {
  InducedCheck out;
  out.samples = samples;
  Rng rng(seed);
  auto one = make_space({1.0});
  for (int s = 0; s < samples; ++s) {
    double m = s == 0 ? -1.0 : -std::pow(10.0, rng.uniform(-3.0, 3.0));
    if (!(risk_value(spec, Position::constant(one, m)).value() > 0.0)) {
      out.holds = false;
      out.witness_m = m;
      return out;
    }
  }
  for (int s = 0; s < samples; ++s) {
    Position x = random_position(rng);
    bool found = false;
    for (double m = -1.0; m >= -search_limit(x); m *= 2.0) {
      if (risk_value(spec, scale_add(x, 1.0, m)).value() > 0.0) {
        found = true;
        break;
      }
    }
    if (!found) {
      out.holds = false;
      out.witness_x = x;
      return out;
    }
  }
  return out;
}

}  // namespace losssense
