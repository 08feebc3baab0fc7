#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "losssense/functionals.hpp"
#include "losssense/random.hpp"
#include "losssense/recession.hpp"

namespace losssense {

/// Threshold for "strictly positive"; scaled by max(1, lambda * ||X||) along rays.
inline constexpr double kPositiveTol = 1e-12;

// ---- domains ---------------------------------------------------------------

enum class DomainTag { full, sure_losses, pure_losses, expected_losses, custom };

struct DomainSpec {
  DomainTag tag = DomainTag::full;
  std::string name = "full";
  bool is_cone = true;
  bool cash_stable = true;  // S + R contained in S
  std::function<bool(const Position&)> predicate;

  static DomainSpec full() { return {DomainTag::full, "full", true, true, {}}; }
  static DomainSpec sure_losses() { return {DomainTag::sure_losses, "sure", true, false, {}}; }
  static DomainSpec pure_losses() { return {DomainTag::pure_losses, "pure", true, false, {}}; }
  static DomainSpec expected_losses() { return {DomainTag::expected_losses, "expected", true, false, {}}; }
  static DomainSpec custom(std::string name, std::function<bool(const Position&)> pred, bool is_cone,
                           bool cash_stable) {
    if (!pred) throw ParameterError("custom domain needs a predicate");
    return {DomainTag::custom, std::move(name), is_cone, cash_stable, std::move(pred)};
  }

  bool contains(const Position& x) const {
    switch (tag) {
      case DomainTag::full: return true;
      case DomainTag::sure_losses: return ess_sup(x) < 0.0;
      case DomainTag::pure_losses: return ess_sup(x) <= 0.0 && ess_inf(x) < 0.0;
      case DomainTag::expected_losses: return expectation(x) <= 0.0 && !(ess_inf(x) == 0.0 && ess_sup(x) == 0.0);
      default: return predicate(x);
    }
  }
};

/// Sure, pure, expected, full: nested from smallest to largest.
inline std::vector<DomainSpec> builtin_domains() {
  return {DomainSpec::sure_losses(), DomainSpec::pure_losses(), DomainSpec::expected_losses(), DomainSpec::full()};
}

inline std::optional<DomainSpec> domain_by_name(const std::string& name) {
  for (auto& d : builtin_domains())
    if (d.name == name) return d;
  return std::nullopt;
}

using Sampler = std::function<Position(Rng&)>;

/// Random positions from the domain: a full-space draw followed by a projection
/// (sure: -|x| - 0.1, pure: -|x|, expected: x - E[x] - |eps|), or rejection for custom domains.
inline Sampler default_sampler(const DomainSpec& d) {
  return [d](Rng& rng) -> Position {
    if (d.tag == DomainTag::custom) {
      for (int attempt = 0; attempt < 10000; ++attempt) {
        Position x = random_position(rng);
        if (has_losses(x) && d.contains(x)) return x;
      }
      throw ParameterError("custom domain '" + d.name + "': rejection sampling found no position with losses");
    }
    for (;;) {
      Position x = random_position(rng);
      std::vector<double> v = x.outcomes();
      switch (d.tag) {
        case DomainTag::sure_losses:
          for (double& o : v) o = -std::abs(o) - 0.1;
          break;
        case DomainTag::pure_losses:
          for (double& o : v) o = -std::abs(o);
          break;
        case DomainTag::expected_losses: {
          double shift = expectation(x) + std::abs(rng.uniform(0.0, 1.0));
          for (double& o : v) o -= shift;
          break;
        }
        default:
          break;
      }
      Position y(x.space(), std::move(v));
      if (has_losses(y)) return y;
    }
  };
}

// ---- verdicts --------------------------------------------------------------

enum class Status { sensitive, insensitive, inconclusive };
enum class Method {
  theorem_cash_additive,
  theorem_star_shaped,
  tail_ratio,
  oce_asymptotic,
  strict_expectation_bound,
  direct_sweep
};

inline const char* status_name(Status s) {
  switch (s) {
    case Status::sensitive: return "sensitive";
    case Status::insensitive: return "insensitive";
    default: return "inconclusive";
  }
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::theorem_cash_additive: return "theorem_cash_additive";
    case Method::theorem_star_shaped: return "theorem_star_shaped";
    case Method::tail_ratio: return "tail_ratio";
    case Method::oce_asymptotic: return "oce_asymptotic";
    case Method::strict_expectation_bound: return "strict_expectation_bound";
    default: return "direct_sweep";
  }
}

struct LambdaValue {
  double lambda;
  Extended value;  // functional at lambda X, native orientation
};

struct Evidence {
  std::string identity;
  std::vector<LambdaValue> sequence;
};

struct SensitivityVerdict {
  Status status = Status::inconclusive;
  Method method = Method::direct_sweep;
  bool certified = false;  // false: conclusion rests on sampled positions
  std::string domain;
  std::string criterion;
  std::optional<double> lambda_x;     // sensitive: largest per-position threshold observed
  std::optional<Position> witness;    // insensitive
  std::optional<Evidence> evidence;   // insensitive
  double lambda_max = 0.0;
  int positions_tried = 0;
  std::uint64_t seed = 0;
};

enum class PositionOutcome { certified_sensitive, certified_insensitive, undecided };

inline const char* outcome_name(PositionOutcome o) {
  switch (o) {
    case PositionOutcome::certified_sensitive: return "certified_sensitive";
    case PositionOutcome::certified_insensitive: return "certified_insensitive";
    default: return "undecided";
  }
}

struct PositionVerdict {
  PositionOutcome outcome = PositionOutcome::undecided;
  std::optional<double> lambda_x;
  Evidence evidence;
  std::string reason;
};

struct SllOptions {
  int trials = 100;
  std::uint64_t seed = 42;
  int lambda_exponent = 40;  // rays are probed at lambda = 2^0 .. 2^lambda_exponent
  int jobs = 1;
  Sampler sampler;           // empty: default_sampler(domain)
};

namespace detail {

inline bool positive_at(const Extended& risk, double scale) {
  if (risk.is_plus_infinity()) return true;
  if (!risk.is_finite()) return false;
  return risk.value() > kPositiveTol * std::max(1.0, scale);
}

/// Native values along lambda = 2^k, k in [k_from, k_to].
inline std::vector<LambdaValue> ray_values(const FunctionalSpec& spec, const Position& x, int k_from, int k_to) {
  std::vector<LambdaValue> out;
  for (int k = k_from; k <= k_to; ++k) {
    double lambda = std::ldexp(1.0, k);
    out.push_back({lambda, evaluate(spec, scale_add(x, lambda, 0.0))});
  }
  return out;
}

inline Extended to_risk(const FunctionalSpec& spec, const Extended& native) {
  return spec.kind() == Kind::risk ? native : -native;
}

/// Evidence that R(lambda X) <= 0 at every scheduled lambda in [2^k_from, 2^k_to].
inline std::optional<Evidence> verify_ray(const FunctionalSpec& spec, const Position& x, std::string identity,
                                          int k_from, int k_to) {
  Evidence ev{std::move(identity), ray_values(spec, x, k_from, k_to)};
  for (const auto& p : ev.sequence)
    if (positive_at(to_risk(spec, p.value), p.lambda * sup_norm(x))) return std::nullopt;
  return ev;
}

/// Evidence that R(lambda X) <= 0 on a contiguous tail of at least min_run scheduled lambdas ending at 2^k_to.
inline std::optional<Evidence> verify_tail(const FunctionalSpec& spec, const Position& x, const std::string& what,
                                           int k_to, int min_run = 10) {
  auto seq = ray_values(spec, x, 0, k_to);
  int last_bad = -1;
  for (int i = 0; i < static_cast<int>(seq.size()); ++i)
    if (positive_at(to_risk(spec, seq[i].value), seq[i].lambda * sup_norm(x))) last_bad = i;
  if (static_cast<int>(seq.size()) - 1 - last_bad < min_run) return std::nullopt;
  Evidence ev{what + "; R(lambda X) <= 0 for lambda >= 2^" + std::to_string(last_bad + 1), std::move(seq)};
  return ev;
}

template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next++;
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline SensitivityVerdict sensitive_verdict(const DomainSpec& d, Method m, std::string why) {
  SensitivityVerdict v;
  v.status = Status::sensitive;
  v.method = m;
  v.certified = true;
  v.domain = d.name;
  v.criterion = std::move(why);
  return v;
}

inline SensitivityVerdict insensitive_verdict(const DomainSpec& d, Method m, Position w, Evidence ev,
                                              std::string why) {
  SensitivityVerdict v;
  v.status = Status::insensitive;
  v.method = m;
  v.certified = true;
  v.domain = d.name;
  v.criterion = std::move(why);
  v.witness = std::move(w);
  v.evidence = std::move(ev);
  return v;
}

/// -1_A + n 1_{A^c} with P(A) = level / 2; ES at that level is zero.
inline Position es_witness(double level) {
  double p = level / 2.0;
  double n = level < 1.0 ? std::max(1.0, std::ceil(p / (level - p))) : 1.0;
  return binary_position(p, -1.0, n);
}

/// 1_{A^c} - 1_A with P(A) small enough for the gain tail to outweigh the loss tail.
inline Position tail_ratio_witness(double ratio) { return binary_position(0.5 / (2.0 - ratio), -1.0, 1.0); }

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Verdicts that hold on the full space, from closed-form criteria.
inline std::optional<SensitivityVerdict> full_space_criterion(const FunctionalSpec& spec, int kmax);

// A negated functional is decided by the one it wraps.
inline const FunctionalSpec& innermost(const FunctionalSpec& spec) {
  if (const auto* n = spec.as<variant::Negation>()) return innermost(*n->inner);
  return spec;
}

template <class U>
std::optional<SensitivityVerdict> utility_tail_criterion(const FunctionalSpec& spec, const U& v, bool flags_ok,
                                                         int kmax) {
  const DomainSpec full = DomainSpec::full();
  double r = v.u.loss_gain_ratio();
  if (r == -kInf) {
    if (!flags_ok) return std::nullopt;
    return sensitive_verdict(full, Method::tail_ratio, "limsup u(-x)/u(x) = -inf");
  }
  Position w = tail_ratio_witness(r);
  auto ev = verify_tail(spec, w, "limsup u(-x)/u(x) = " + fmt(r) + " > -inf", kmax);
  if (!ev) return std::nullopt;
  return insensitive_verdict(full, Method::tail_ratio, w, *ev, "limsup u(-x)/u(x) = " + fmt(r));
}

inline std::optional<SensitivityVerdict> full_space_criterion(const FunctionalSpec& spec, int kmax) {
  const DomainSpec full = DomainSpec::full();
  if (spec.as<variant::WorstCase>())
    return sensitive_verdict(full, Method::theorem_cash_additive, "recession equals ess sup(-X)");
  if (const auto* v = spec.as<variant::VaR>()) {
    Position w = binary_position(v->alpha / 2.0, -1.0, 0.0);
    auto ev = verify_ray(spec, w, "VaR(lambda X) = lambda VaR(X) = 0", 0, kmax);
    if (!ev) return std::nullopt;
    return insensitive_verdict(full, Method::theorem_cash_additive, w, *ev, "P(X < 0) <= alpha gives VaR(X) = 0");
  }
  if (const auto* v = spec.as<variant::ES>()) {
    Position w = es_witness(v->alpha);
    auto ev = verify_ray(spec, w, "ES(lambda X) = lambda ES(X) <= 0", 0, kmax);
    if (!ev) return std::nullopt;
    return insensitive_verdict(full, Method::theorem_cash_additive, w, *ev, "ES(X) <= 0 with P(X < 0) > 0");
  }
  if (const auto* v = spec.as<variant::LVaR>()) {
    double a = v->profile.alpha_inf();
    if (a == 0.0) return sensitive_verdict(full, Method::theorem_cash_additive, "alpha(-inf) = 0");
    Position w = binary_position(a / 2.0, -1.0, 0.0);
    auto ev = verify_ray(spec, w, "R(lambda X) <= lambda VaR_alpha_inf(X) = 0", 0, kmax);
    if (!ev) return std::nullopt;
    return insensitive_verdict(full, Method::theorem_cash_additive, w, *ev, "alpha(-inf) = " + fmt(a) + " > 0");
  }
  if (const auto* v = spec.as<variant::AdjES>()) {
    double p = v->g.inf_prefix();
    if (p == 0.0) return sensitive_verdict(full, Method::theorem_cash_additive, "g finite everywhere");
    Position w = es_witness(p);
    auto ev = verify_ray(spec, w, "R(lambda X) <= lambda ES_p(X) <= 0", 0, kmax);
    if (!ev) return std::nullopt;
    return insensitive_verdict(full, Method::theorem_cash_additive, w, *ev, "g = inf on (0, " + fmt(p) + ")");
  }
  if (spec.as<variant::Entropic>())
    return sensitive_verdict(full, Method::tail_ratio, "exponential loss: limsup l(x)/l(-x) = -inf");
  if (const auto* v = spec.as<variant::Shortfall>()) {
    if (!v->loss.flags().pos_star_shaped_on_neg) return std::nullopt;
    double r = v->loss.gain_loss_ratio();
    if (r == -kInf) return sensitive_verdict(full, Method::tail_ratio, "limsup l(x)/l(-x) = -inf");
    Position w = tail_ratio_witness(r);
    auto ev = verify_tail(spec, w, "limsup l(x)/l(-x) = " + fmt(r) + " > -inf", kmax);
    if (!ev) return std::nullopt;
    return insensitive_verdict(full, Method::tail_ratio, w, *ev, "limsup l(x)/l(-x) = " + fmt(r));
  }
  if (const auto* v = spec.as<variant::ExpectedUtility>())
    return utility_tail_criterion(spec, *v, v->u.flags().neg_star_shaped_on_pos, kmax);
  if (const auto* v = spec.as<variant::ClassicalCE>()) {
    const auto& f = v->u.flags();
    return utility_tail_criterion(
        spec, *v, f.neg_star_shaped_on_pos && f.left_continuous_at_0 && f.strictly_negative_on_neg, kmax);
  }
  if (const auto* v = spec.as<variant::UMeanCE>()) {
    const auto& f = v->u.flags();
    return utility_tail_criterion(spec, *v, f.neg_star_shaped_on_pos && f.strictly_negative_on_neg, kmax);
  }
  if (const auto* v = spec.as<variant::OCE>()) {
    double a = v->u.slope_at_minus_infinity();
    double b = v->u.slope_at_plus_infinity();
    if (a == kInf && b == 0.0)
      return sensitive_verdict(full, Method::oce_asymptotic, "u(x)/x -> inf at -inf and -> 0 at +inf");
    Position w = a < kInf ? binary_position(1.0 / (2.0 * (a + 1.0)), -1.0, 1.0)
                          : binary_position(2.0 * b / 3.0, 2.0 / (b * b) - 1.0, -1.0);
    std::string what = a < kInf ? "lim u(x)/x at -inf = " + fmt(a) + " < inf"
                                : "lim u(x)/x at +inf = " + fmt(b) + " > 0";
    auto ev = verify_tail(spec, w, what, kmax);
    if (!ev) return std::nullopt;
    return insensitive_verdict(full, Method::oce_asymptotic, w, *ev, what);
  }
  if (const auto* v = spec.as<variant::Negation>()) {
    auto inner = full_space_criterion(*v->inner, kmax);
    if (inner && inner->evidence)
      for (auto& p : inner->evidence->sequence) p.value = -p.value;
    return inner;
  }
  return std::nullopt;
}

}  // namespace detail

// ---- single positions ------------------------------------------------------

/// P(X < 0) > 0 implies R(X) > 1e-12.
inline bool sensitive_to_losses(const FunctionalSpec& spec, const Position& x) {
  if (!has_losses(x)) return true;
  return detail::positive_at(risk_value(spec, x), 0.0);
}

/// Decide whether R(lambda X) > 0 for all large lambda, for one X with P(X < 0) > 0.
inline PositionVerdict sll_position(const FunctionalSpec& spec, const Position& x, int lambda_exponent = 40) {
  if (!has_losses(x)) throw ParameterError("sll_position needs P(X < 0) > 0");
  const int K = lambda_exponent;
  const double norm = sup_norm(x);
  PositionVerdict out;

  if (spec.flags().pos_homogeneous) {
    Extended r = risk_value(spec, x);
    out.evidence.sequence.push_back({1.0, evaluate(spec, x)});
    if (detail::positive_at(r, norm)) {
      out.outcome = PositionOutcome::certified_sensitive;
      out.lambda_x = 1.0;
      out.reason = "positive homogeneity: R(lambda X) = lambda R(X) > 0 for every lambda > 0";
      return out;
    }
    if (auto ev = detail::verify_ray(spec, x, "positive homogeneity: R(lambda X) = lambda R(X) <= 0", 0, K)) {
      out.outcome = PositionOutcome::certified_insensitive;
      out.evidence = *ev;
      out.reason = ev->identity;
      return out;
    }
  }

  if (const auto* c = detail::innermost(spec).as<variant::Custom>(); c && c->ray_identity) {
    if (auto cert = c->ray_identity(x)) {
      int k0 = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(cert->lambda_from, 1e-300)))));
      if (k0 <= K) {
        if (auto ev = detail::verify_ray(spec, x, cert->identity, k0, K)) {
          out.outcome = PositionOutcome::certified_insensitive;
          out.evidence = *ev;
          out.reason = cert->identity;
          return out;
        }
      }
    }
  }

  std::vector<LambdaValue> seq;
  try {
    seq = detail::ray_values(spec, x, 0, K);
  } catch (const DivergenceError& e) {
    out.reason = std::string("evaluation diverged: ") + e.what();
    return out;
  }
  out.evidence.sequence = seq;

  if (spec.flags().star_shaped) {
    for (const auto& p : seq) {
      if (detail::positive_at(detail::to_risk(spec, p.value), p.lambda * norm)) {
        out.outcome = PositionOutcome::certified_sensitive;
        out.lambda_x = p.lambda;
        out.reason = "star-shaped: R(lambda X) / lambda is nondecreasing, first positive value at lambda = " +
                     detail::fmt(p.lambda);
        return out;
      }
    }
    if (auto a = detail::analytic_recession(spec, x)) {
      Extended rec = detail::to_risk(spec, *a);
      if (!detail::positive_at(rec, norm)) {
        out.outcome = PositionOutcome::certified_insensitive;
        out.evidence.identity = "star-shaped: R(lambda X) <= lambda R_inf(X) <= 0";
        out.reason = out.evidence.identity;
        return out;
      }
    }
    out.reason = "no positive value up to lambda = 2^" + std::to_string(K);
    return out;
  }

  bool tail_positive = detail::positive_at(detail::to_risk(spec, seq.back().value), seq.back().lambda * norm);
  out.reason = std::string("not star-shaped; value at lambda = 2^") + std::to_string(K) +
               (tail_positive ? " is positive" : " is non-positive");
  return out;
}

// ---- domain-level certification --------------------------------------------

namespace detail {

inline std::vector<Position> draw_positions(const DomainSpec& d, const SllOptions& opt, std::uint64_t seed) {
  Sampler s = opt.sampler ? opt.sampler : default_sampler(d);
  Rng rng(seed);
  std::vector<Position> out;
  for (int i = 0; i < opt.trials; ++i) {
    Position x = s(rng);
    if (!d.contains(x)) throw std::logic_error("sampler produced a position outside domain '" + d.name + "'");
    if (!has_losses(x)) throw std::logic_error("sampler produced a position without losses");
    out.push_back(std::move(x));
  }
  return out;
}

inline SensitivityVerdict finish(SensitivityVerdict v, const SllOptions& opt, int tried) {
  v.lambda_max = std::ldexp(1.0, opt.lambda_exponent);
  v.positions_tried = tried;
  v.seed = opt.seed;
  return v;
}

// Step 1': strict expectation bound R(X) > E[-X] on sampled nonconstant X.
inline std::optional<SensitivityVerdict> strict_bound_step(const FunctionalSpec& spec, const DomainSpec& d,
                                                           const SllOptions& opt) {
  Rng rng(opt.seed + 1);
  for (int i = 0; i < opt.trials; ++i) {
    Position x = random_nonconstant_position(rng);
    double gap = risk_value(spec, x).value() - expectation(-x);
    if (!(gap > kPositiveTol * std::max(1.0, sup_norm(x)))) {
      if (d.tag != DomainTag::expected_losses) return std::nullopt;
      Position y = x - expectation(x);
      auto ev = verify_ray(spec, y, "R(lambda Y) = lambda (R(X) - E[-X]) <= 0 with Y = X - E[X]", 0,
                           opt.lambda_exponent);
      if (!ev || !d.contains(y)) return std::nullopt;
      return finish(insensitive_verdict(d, Method::strict_expectation_bound, y, *ev,
                                        "R(X) <= E[-X] for a nonconstant X"),
                    opt, i + 1);
    }
  }
  SensitivityVerdict v = sensitive_verdict(d, Method::strict_expectation_bound, "R(X) > E[-X] on every sample");
  const auto* es_spec = innermost(spec).as<variant::ES>();
  v.certified = es_spec && es_spec->alpha < 1.0;  // proved for ES below level 1
  if (v.certified) v.criterion = "ES_alpha(X) > E[-X] for nonconstant X when alpha < 1";
  return finish(v, opt, opt.trials);
}

struct RecessionSample {
  enum class Kind { matches, below, unknown } kind = Kind::unknown;
  double rec = 0.0;
  double esn = 0.0;
};

// Step 2: recession against ess sup(-X) for cash-additive star-shaped specs.
inline std::optional<SensitivityVerdict> recession_step(const FunctionalSpec& spec, const DomainSpec& d,
                                                        const SllOptions& opt) {
  auto xs = draw_positions(d, opt, opt.seed + 2);
  std::vector<RecessionSample> res(xs.size());
  RecessionOptions ro;
  ro.max_exponent = opt.lambda_exponent;
  parallel_for(xs.size(), opt.jobs, [&](std::size_t i) {
    RecessionEstimate est = recession(spec, xs[i], ro);
    Extended rec = to_risk(spec, est.value);
    double esn = ess_sup_neg(xs[i]);
    RecessionSample s;
    s.esn = esn;
    if (!rec.is_finite()) {
      s.kind = rec.is_plus_infinity() ? RecessionSample::Kind::matches : RecessionSample::Kind::unknown;
    } else {
      s.rec = rec.value();
      if (std::abs(s.rec - esn) < 1e-6) s.kind = RecessionSample::Kind::matches;
      else if (est.mode != RecessionMode::numeric_lower_bound && s.rec < esn - 1e-6)
        s.kind = RecessionSample::Kind::below;
    }
    res[i] = s;
  });
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (res[i].kind != RecessionSample::Kind::below) continue;
    double c = (res[i].rec + res[i].esn) / 2.0;
    Position y = xs[i] + c;
    auto ev = verify_ray(spec, y, "star-shaped: R(lambda Y) <= lambda R_inf(Y) = lambda (R_inf(X) - c) < 0", 0,
                         opt.lambda_exponent);
    if (ev && d.contains(y) && has_losses(y))
      return finish(insensitive_verdict(d, Method::theorem_cash_additive, y, *ev,
                                        "R_inf(X) < ess sup(-X): shift X by c = " + fmt(c)),
                    opt, static_cast<int>(i) + 1);
  }
  for (const auto& s : res)
    if (s.kind != RecessionSample::Kind::matches) return std::nullopt;
  SensitivityVerdict v =
      sensitive_verdict(d, Method::theorem_cash_additive, "R_inf(X) = ess sup(-X) within 1e-6 on every sample");
  v.certified = false;
  return finish(v, opt, static_cast<int>(xs.size()));
}

// Step 3: per-position sweeps.
inline SensitivityVerdict sweep_step(const FunctionalSpec& spec, const DomainSpec& d, const SllOptions& opt) {
  auto xs = draw_positions(d, opt, opt.seed + 3);
  std::vector<PositionVerdict> res(xs.size());
  std::vector<char> cone_positive(xs.size(), 0);
  parallel_for(xs.size(), opt.jobs, [&](std::size_t i) {
    res[i] = sll_position(spec, xs[i], opt.lambda_exponent);
    if (res[i].outcome == PositionOutcome::undecided && d.is_cone) {
      // on a cone every lambda X stays in the domain; positivity on the whole two-sided schedule
      // is sensitivity to losses along the ray
      bool all = true;
      try {
        for (const auto& p : ray_values(spec, xs[i], -opt.lambda_exponent, opt.lambda_exponent))
          if (!positive_at(to_risk(spec, p.value), p.lambda * sup_norm(xs[i]))) all = false;
      } catch (const DivergenceError&) {
        all = false;
      }
      cone_positive[i] = all ? 1 : 0;
    }
  });
  const Method m = spec.flags().star_shaped ? Method::theorem_star_shaped : Method::direct_sweep;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (res[i].outcome != PositionOutcome::certified_insensitive) continue;
    Evidence ev = res[i].evidence;
    if (ev.sequence.empty()) ev.sequence = ray_values(spec, xs[i], 0, opt.lambda_exponent);
    return finish(insensitive_verdict(d, m, xs[i], ev, res[i].reason), opt, static_cast<int>(i) + 1);
  }
  double worst = 0.0;
  bool undecided = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (res[i].outcome == PositionOutcome::certified_sensitive) worst = std::max(worst, *res[i].lambda_x);
    else if (!cone_positive[i]) undecided = true;
  }
  if (undecided) {
    SensitivityVerdict v;
    v.domain = d.name;
    v.criterion = "some sampled positions are undecided";
    return finish(v, opt, static_cast<int>(xs.size()));
  }
  SensitivityVerdict v = sensitive_verdict(d, m, "every sampled position is certified sensitive");
  v.certified = false;
  if (worst > 0.0) v.lambda_x = worst;
  return finish(v, opt, static_cast<int>(xs.size()));
}

}  // namespace detail

/// Certify or refute sensitivity to large losses on a domain.
///
/// Order: closed-form criteria for the variant, the strict expectation bound on
/// loss domains, the recession comparison for cash-additive star-shaped specs on
/// cash-stable domains, and finally per-position sweeps on sampled positions.
inline SensitivityVerdict sll_certify(const FunctionalSpec& spec, const DomainSpec& domain, SllOptions opt = {}) {
  const int K = opt.lambda_exponent;
  if (auto v = detail::full_space_criterion(spec, K)) {
    if (v->status == Status::sensitive) {
      v->domain = domain.name;
      if (domain.tag != DomainTag::full) v->criterion += " (holds on the full space, hence on every domain)";
      return detail::finish(*v, opt, 0);
    }
    if (v->witness && domain.contains(*v->witness)) {
      v->domain = domain.name;
      if (domain.tag != DomainTag::full) v->method = Method::direct_sweep;
      return detail::finish(*v, opt, 0);
    }
  }
  if (detail::innermost(spec).as<variant::VaR>() && domain.tag == DomainTag::sure_losses) {
    return detail::finish(detail::sensitive_verdict(domain, Method::theorem_star_shaped,
                                                    "X < 0 gives VaR(X) > 0; positive homogeneity extends it"),
                          opt, 0);
  }
  const auto& f = spec.flags();
  bool loss_domain = domain.tag == DomainTag::expected_losses || domain.tag == DomainTag::pure_losses ||
                     domain.tag == DomainTag::sure_losses;
  if (loss_domain && f.pos_homogeneous && f.cash_additive) {
    if (auto v = detail::strict_bound_step(spec, domain, opt)) return *v;
  }
  if (f.cash_additive && f.star_shaped && domain.cash_stable) {
    if (auto v = detail::recession_step(spec, domain, opt)) return *v;
  }
  return detail::sweep_step(spec, domain, opt);
}

// ---- localized battery -----------------------------------------------------

struct BatteryReport {
  std::vector<SensitivityVerdict> rows;  // sure, pure, expected, full
  bool ordering_holds = true;
  std::vector<std::string> ordering_violations;
};

inline BatteryReport localized_battery(const FunctionalSpec& spec, SllOptions opt = {}) {
  BatteryReport rep;
  for (const auto& d : builtin_domains()) rep.rows.push_back(sll_certify(spec, d, opt));
  // sensitivity on a larger domain implies it on every smaller one
  for (std::size_t big = 1; big < rep.rows.size(); ++big) {
    for (std::size_t small = 0; small < big; ++small) {
      const auto& b = rep.rows[big];
      const auto& s = rep.rows[small];
      if (!b.certified || !s.certified) continue;
      if (b.status == Status::sensitive && s.status == Status::insensitive) {
        rep.ordering_holds = false;
        rep.ordering_violations.push_back(b.domain + " sensitive but " + s.domain + " insensitive");
      }
    }
  }
  return rep;
}

// ---- loss concentrations ---------------------------------------------------

enum class ConcentrationOutcome { concentration_sensitive, counterexample, undecided };

inline const char* concentration_name(ConcentrationOutcome o) {
  switch (o) {
    case ConcentrationOutcome::concentration_sensitive: return "concentration_sensitive";
    case ConcentrationOutcome::counterexample: return "counterexample";
    default: return "undecided";
  }
}

struct ConcentrationResult {
  ConcentrationOutcome outcome = ConcentrationOutcome::undecided;
  std::optional<double> lambda;
  std::vector<LambdaValue> sweep;  // native values of X - lambda 1_A
  std::string reason;
};

/// Search for lambda with R(X - lambda 1_A) > 0. The map is nondecreasing in lambda for a
/// monotone R, so the first positive value settles every larger lambda. A sweep whose
/// values stay non-positive and flat over the last 8 steps is reported as a counterexample.
inline ConcentrationResult loss_concentration_check(const FunctionalSpec& spec, const Position& x,
                                                    const EventMask& a, int lambda_exponent = 40,
                                                    std::optional<Status> pure_verdict = std::nullopt) {
  a.check(*x.space());
  if (!(a.probability(*x.space()) > 0.0)) throw ParameterError("loss concentration check needs P(A) > 0");
  ConcentrationResult out;
  if (spec.flags().star_shaped && pure_verdict == Status::sensitive) {
    out.outcome = ConcentrationOutcome::concentration_sensitive;
    out.reason = "star-shaped and sensitive to large pure losses, hence sensitive to loss concentrations";
    return out;
  }
  Position ind = indicator(x.space(), a);
  std::vector<double> risk;
  for (int k = -20; k <= lambda_exponent; ++k) {
    double lambda = std::ldexp(1.0, k);
    Position y = x - lambda * ind;
    Extended v = evaluate(spec, y);
    out.sweep.push_back({lambda, v});
    Extended r = detail::to_risk(spec, v);
    if (detail::positive_at(r, sup_norm(y))) {
      out.outcome = ConcentrationOutcome::concentration_sensitive;
      out.lambda = lambda;
      out.reason = "R(X - lambda 1_A) > 0";
      return out;
    }
    risk.push_back(r.is_finite() ? r.value() : -kInf);
  }
  const std::size_t n = risk.size();
  bool flat = n >= 8;
  for (std::size_t i = n - 8; flat && i + 1 < n; ++i)
    if (!(std::abs(risk[i + 1] - risk[i]) <= 1e-9 * std::max(1.0, std::abs(risk[i])))) flat = false;
  if (flat) {
    out.outcome = ConcentrationOutcome::counterexample;
    out.lambda = out.sweep.back().lambda;
    out.reason = "R(X - lambda 1_A) <= 0 on the whole sweep and constant over its last 8 steps";
  } else {
    out.reason = "R(X - lambda 1_A) <= 0 on the sweep but still changing";
  }
  return out;
}

// ---- risk reduction --------------------------------------------------------

struct ReductionResult {
  double best_gap = -kInf;  // max of R(X + Y) - R(Y), risk orientation
  std::optional<Position> best_y;
  int candidates_tried = 0;
};

/// Constants, and scaled indicators of every nonempty atom subset (spaces up to 12 atoms).
inline std::vector<Position> default_reduction_candidates(const Position& x) {
  const double big = 1.0 + sup_norm(x);
  const double scales[] = {1.0, -1.0, big, -big, 10.0, -10.0};
  std::vector<Position> out;
  out.push_back(Position::constant(x.space(), 0.0));
  for (double s : scales) out.push_back(Position::constant(x.space(), s));
  const std::size_t n = x.size();
  if (n > 12) return out;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<bool> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = (mask >> i) & 1u;
    Position ind = indicator(x.space(), EventMask(m));
    for (double s : scales) out.push_back(s * ind);
  }
  return out;
}

/// Falsification search for Y with R(X + Y) > R(Y). A non-positive result proves nothing.
inline ReductionResult risk_reduction_probe(const FunctionalSpec& spec, const Position& x,
                                            std::optional<std::vector<Position>> candidates = std::nullopt) {
  if (!has_losses(x)) throw ParameterError("risk reduction probe needs P(X < 0) > 0");
  std::vector<Position> ys = candidates ? *candidates : default_reduction_candidates(x);
  ReductionResult out;
  for (const auto& y : ys) {
    require_same_space(x, y);
    ++out.candidates_tried;
    Extended a = risk_value(spec, x + y);
    Extended b = risk_value(spec, y);
    if (!a.is_finite() || !b.is_finite()) continue;
    double gap = a.value() - b.value();
    if (gap > out.best_gap) {
      out.best_gap = gap;
      out.best_y = y;
    }
  }
  return out;
}

}  // namespace losssense
