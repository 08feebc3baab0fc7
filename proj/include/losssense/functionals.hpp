#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "losssense/extended.hpp"
#include "losssense/functional_spec.hpp"
#include "losssense/prob_core.hpp"
#include "losssense/profiles.hpp"
#include "losssense/scalar_fn.hpp"
#include "losssense/solvers.hpp"

namespace losssense {

/// Bracket bound for root searches: 1e12 scaled by the size of the position.
inline double search_limit(const Position& x) { return 1e12 * std::max(1.0, sup_norm(x)); }

/// sup over l <= 0 of VaR_{alpha(l)}(X) + l.
inline double lvar(const AlphaProfile& profile, const Position& x) {
  auto var_at = [&](double a) { return a == 0.0 ? var0(x) : var(x, a); };
  const auto& b = profile.breakpoints();
  // below the first breakpoint alpha is alpha_inf; the sup there is approached at loss_0
  double best = var_at(profile.alpha_inf()) + b.front().loss;
  for (std::size_t k = 0; k < b.size(); ++k) {
    double right = k + 1 < b.size() ? b[k + 1].loss : 0.0;
    best = std::max(best, var_at(b[k].alpha) + right);
  }
  return best;
}

/// sup over alpha in (0,1] of ES_alpha(X) - g(alpha), by exact candidate enumeration.
inline double adj_es(const GProfile& g, const Position& x) {
  double p = g.inf_prefix();
  std::vector<double> cands{1.0};
  if (p > 0.0) cands.push_back(p);
  auto es_p = es_pieces(x);
  auto g_p = g.linear_pieces();
  for (const auto& e : es_p) {
    cands.push_back(e.lo);
    cands.push_back(e.hi);
  }
  for (const auto& q : g.points()) cands.push_back(q.alpha);
  for (const auto& e : es_p) {
    for (const auto& l : g_p) {
      double lo = std::max(e.lo, l.lo), hi = std::min(e.hi, l.hi);
      if (lo > hi || !(l.slope < 0.0 && e.c > 0.0)) continue;
      double s = std::sqrt(-e.c / l.slope);
      if (s >= lo && s <= hi) cands.push_back(s);
    }
  }
  double best = -kInf;
  if (p == 0.0) best = ess_sup_neg(x) - g.points().front().g;  // alpha -> 0+
  for (double a : cands) {
    if (!(a > 0.0) || a < p || a > 1.0) continue;
    best = std::max(best, es(x, a) - g(a));
  }
  return best;
}

/// (1/gamma) log E[exp(-gamma X)], evaluated in log-space.
inline double entropic(double gamma, const Position& x) {
  double m = -kInf;
  for (double v : x.outcomes()) m = std::max(m, -gamma * v);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.prob(i) * std::exp(-gamma * x.outcome(i) - m);
  return (m + std::log(s)) / gamma;
}

/// E[l(-X - m)].
inline double expected_loss(const LossFn& loss, const Position& x, double m) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.prob(i) * loss(-x.outcome(i) - m);
  return s;
}

/// inf{m : E[l(-X - m)] <= 0}.
inline double shortfall(const LossFn& loss, const Position& x) {
  auto t = locate_threshold([&](double m) { return expected_loss(loss, x, m) <= 0.0; }, search_limit(x));
  if (t.kind == Threshold::Kind::never_true)
    throw DivergenceError("shortfall diverged upward: no acceptable capital below +1e12 scale");
  if (t.kind == Threshold::Kind::always_true)
    throw DivergenceError("shortfall diverged downward: acceptable at every capital above -1e12 scale");
  return t.above;
}

/// E[u(X)]; -inf when an atom with positive mass has utility -inf.
inline Extended expected_utility(const UtilityFn& u, const Position& x) {
  double s = 0.0;
  bool structural = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = u(x.outcome(i));
    if (v == -kInf) structural = structural || u.fn().infinite_form_at(x.outcome(i));
    s += x.prob(i) * v;
  }
  if (structural) return Extended::minus_infinity();
  return Extended::from_double(s);  // a raw -inf here is an overflow and gets flagged
}

/// u^{-1}(E[u(X)]) with u^{-1}(y) = inf{x : u(x) >= y}.
inline Extended classical_ce(const UtilityFn& u, const Position& x) {
  Extended eu = expected_utility(u, x);
  if (!eu.is_finite()) return eu;
  double lo = kInf, hi = -kInf;
  for (double v : x.outcomes()) {
    lo = std::min(lo, u(v));
    hi = std::max(hi, u(v));
  }
  double y = std::clamp(eu.value(), lo, hi);  // guard against summation dust
  double inv = u.inverse(y);
  if (inv == -kInf) return Extended::minus_infinity();
  if (inv == kInf) return Extended::plus_infinity();
  return Extended::finite(inv);
}

/// sup{m : E[u(X - m)] >= 0}.
inline Extended umean_ce(const UtilityFn& u, const Position& x) {
  auto rejected = [&](double m) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x.prob(i) * u(x.outcome(i) - m);
    return !(s >= 0.0);
  };
  auto t = locate_threshold(rejected, search_limit(x));
  if (t.kind == Threshold::Kind::never_true) return Extended::plus_infinity();
  if (t.kind == Threshold::Kind::always_true) return Extended::minus_infinity();
  return Extended::finite(t.below);
}

/// h(eta) = eta + E[u(X - eta)].
inline double oce_objective(const UtilityFn& u, const Position& x, double eta) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.prob(i) * u(x.outcome(i) - eta);
  return eta + s;
}

/// sup over eta of eta + E[u(X - eta)].
inline double oce(const UtilityFn& u, const Position& x) {
  if (!u.flags().below_identity) throw ParameterError("OCE needs u(x) <= x");
  auto h = [&](double eta) { return oce_objective(u, x, eta); };
  const double lo_x = ess_inf(x), hi_x = ess_sup(x);
  double w = (hi_x - lo_x) + 10.0;
  const double tol = 1e-8 * std::max(1.0, sup_norm(x));
  for (int round = 0; round <= 8; ++round) {
    double a = lo_x - w, b = hi_x + w;
    double edge = 0.01 * (b - a);
    double eta = 0.0;
    bool interior_tie = false;
    if (u.flags().concave) {
      eta = ternary_max(h, a, b, tol);
    } else {
      const int n = 512;
      std::vector<double> grid(n), vals(n);
      for (int i = 0; i < n; ++i) {
        grid[i] = a + (b - a) * i / (n - 1);
        vals[i] = h(grid[i]);
      }
      double best = -kInf;
      for (int i = 0; i < n; ++i) {
        bool local_max = (i == 0 || vals[i] >= vals[i - 1]) && (i == n - 1 || vals[i] >= vals[i + 1]);
        if (!local_max) continue;
        double c = golden_max(h, grid[std::max(i - 1, 0)], grid[std::min(i + 1, n - 1)], tol);
        double hc = h(c);
        double cand = hc >= vals[i] ? c : grid[i];
        double hv = std::max(hc, vals[i]);
        if (hv > best) {
          best = hv;
          eta = cand;
        }
      }
      double slack = 1e-12 * (1.0 + std::abs(best));
      for (int i = 0; i < n; ++i)
        if (vals[i] >= best - slack && grid[i] - a > edge && b - grid[i] > edge) interior_tie = true;
    }
    bool at_edge = (eta - a <= edge || b - eta <= edge) && !interior_tie;
    if (!at_edge) return std::max(h(eta), h(0.0));
    w *= 4.0;
  }
  throw DivergenceError("OCE maximizer escapes every search window");
}

// ---- dispatch --------------------------------------------------------------

/// Value of the functional at X: in (-inf, inf] for risk, [-inf, inf) for utility.
inline Extended evaluate(const FunctionalSpec& spec, const Position& x) {
  return std::visit(
      [&x](const auto& v) -> Extended {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, variant::VaR>) {
          return Extended::finite(var(x, v.alpha));
        } else if constexpr (std::is_same_v<T, variant::ES>) {
          return Extended::finite(es(x, v.alpha));
        } else if constexpr (std::is_same_v<T, variant::LVaR>) {
          return Extended::finite(lvar(v.profile, x));
        } else if constexpr (std::is_same_v<T, variant::AdjES>) {
          return Extended::finite(adj_es(v.g, x));
        } else if constexpr (std::is_same_v<T, variant::Shortfall>) {
          return Extended::finite(shortfall(v.loss, x));
        } else if constexpr (std::is_same_v<T, variant::Entropic>) {
          return Extended::from_double(entropic(v.gamma, x));
        } else if constexpr (std::is_same_v<T, variant::WorstCase>) {
          return Extended::finite(ess_sup_neg(x));
        } else if constexpr (std::is_same_v<T, variant::ExpectedUtility>) {
          return expected_utility(v.u, x);
        } else if constexpr (std::is_same_v<T, variant::ClassicalCE>) {
          return classical_ce(v.u, x);
        } else if constexpr (std::is_same_v<T, variant::UMeanCE>) {
          return umean_ce(v.u, x);
        } else if constexpr (std::is_same_v<T, variant::OCE>) {
          return Extended::from_double(oce(v.u, x));
        } else if constexpr (std::is_same_v<T, variant::Custom>) {
          return v.evaluator(x);
        } else {
          return -evaluate(*v.inner, x);
        }
      },
      spec.variant());
}

/// Value in risk orientation: the functional itself for risk kind, its negative for utility kind.
inline Extended risk_value(const FunctionalSpec& spec, const Position& x) {
  Extended v = evaluate(spec, x);
  return spec.kind() == Kind::risk ? v : -v;
}

/// Orientation sign: +1 for risk, -1 for utility.
inline double orientation(const FunctionalSpec& spec) { return spec.kind() == Kind::risk ? 1.0 : -1.0; }

}  // namespace losssense
