#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "losssense/errors.hpp"

namespace losssense {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace form {
/// slope * x + intercept
struct Linear {
  double slope = 1.0;
  double intercept = 0.0;
};
/// scale * sgn(x) * |x|^exponent
struct Power {
  double scale = 1.0;
  double exponent = 1.0;
};
/// amplitude * (1 - exp(-rate * x)) + offset
struct Exponential {
  double amplitude = 1.0;
  double rate = 1.0;
  double offset = 0.0;
};
struct Constant {
  double value = 0.0;
};
struct NegInfinity {};
struct PosInfinity {};
}  // namespace form

using Form = std::variant<form::Linear, form::Power, form::Exponential, form::Constant, form::NegInfinity,
                          form::PosInfinity>;

inline double eval_form(const Form& f, double x) {
  return std::visit(
      [x](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, form::Linear>) {
          return g.slope * x + g.intercept;
        } else if constexpr (std::is_same_v<T, form::Power>) {
          if (x == 0.0) return 0.0;
          double m = g.scale * std::pow(std::abs(x), g.exponent);
          return x > 0.0 ? m : -m;
        } else if constexpr (std::is_same_v<T, form::Exponential>) {
          return g.amplitude * (1.0 - std::exp(-g.rate * x)) + g.offset;
        } else if constexpr (std::is_same_v<T, form::Constant>) {
          return g.value;
        } else if constexpr (std::is_same_v<T, form::NegInfinity>) {
          return -kInf;
        } else {
          return kInf;
        }
      },
      f);
}

/// A form on the half-open interval [from, to).
struct Piece {
  double from = -kInf;
  double to = kInf;
  Form form;
};

/// Dominant behaviour of f(±t) as t -> inf: coef * t^power * exp(rate * t), or an infinite value.
struct Tail {
  double coef = 0.0;
  double power = 0.0;
  double rate = 0.0;
  int infinite = 0;  // -1: the function is -inf there, +1: +inf
};

namespace detail {

inline double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Tail of a form as x = direction * t, t -> inf.
inline Tail form_tail(const Form& f, int direction) {
  double d = direction;
  return std::visit(
      [d](const auto& g) -> Tail {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, form::Linear>) {
          if (g.slope != 0.0) return {d * g.slope, 1.0, 0.0, 0};
          return {g.intercept, 0.0, 0.0, 0};
        } else if constexpr (std::is_same_v<T, form::Power>) {
          return {d * g.scale, g.scale == 0.0 ? 0.0 : g.exponent, 0.0, 0};
        } else if constexpr (std::is_same_v<T, form::Exponential>) {
          double r = d * g.rate;  // exp(-rate*x) = exp(-r t)
          if (r > 0.0) return {g.amplitude + g.offset, 0.0, 0.0, 0};
          if (r < 0.0) return {-g.amplitude, 0.0, -r, 0};
          return {g.offset, 0.0, 0.0, 0};
        } else if constexpr (std::is_same_v<T, form::Constant>) {
          return {g.value, 0.0, 0.0, 0};
        } else if constexpr (std::is_same_v<T, form::NegInfinity>) {
          return {-1.0, 0.0, 0.0, -1};
        } else {
          return {1.0, 0.0, 0.0, 1};
        }
      },
      f);
}

// -1, 0, 1 comparing growth speed of two finite tails.
inline int compare_growth(const Tail& a, const Tail& b) {
  if (a.rate != b.rate) return a.rate < b.rate ? -1 : 1;
  if (a.power != b.power) return a.power < b.power ? -1 : 1;
  return 0;
}

}  // namespace detail

/// lim num(t) / den(t) as t -> inf, for dominant-term tails.
inline double asymptotic_ratio(const Tail& num, const Tail& den) {
  using detail::sign_of;
  if (num.infinite != 0) {
    double s = den.infinite != 0 ? den.infinite : sign_of(den.coef);
    return (s == 0.0 ? 1.0 : s) * num.infinite * kInf;
  }
  if (den.infinite != 0) return 0.0;
  if (den.coef == 0.0) return num.coef == 0.0 ? 0.0 : sign_of(num.coef) * kInf;
  if (num.coef == 0.0) return 0.0;
  int c = detail::compare_growth(num, den);
  if (c > 0) return sign_of(num.coef) * sign_of(den.coef) * kInf;
  if (c < 0) return 0.0;
  return num.coef / den.coef;
}

/// lim f(x)/x as x -> +inf (direction = 1) or x -> -inf (direction = -1).
inline double slope_at_infinity(const Tail& t, int direction) {
  using detail::sign_of;
  double d = direction;
  if (t.infinite != 0) return d * t.infinite * kInf;
  if (t.coef == 0.0) return 0.0;
  if (t.rate > 0.0 || t.power > 1.0) return d * sign_of(t.coef) * kInf;
  if (t.power == 1.0) return d * t.coef;
  return 0.0;
}

/// Scalar function defined piecewise by analytic forms, or by a callback with declared tails.
class PiecewiseFn {
 public:
  PiecewiseFn() = default;

  explicit PiecewiseFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw ValidationError("piecewise function needs at least one piece");
    if (pieces_.front().from != -kInf) throw ValidationError("piece 0 must start at -inf");
    if (pieces_.back().to != kInf)
      throw ValidationError("piece " + std::to_string(pieces_.size() - 1) + " must end at inf");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (!(pieces_[i].from < pieces_[i].to))
        throw ValidationError("piece " + std::to_string(i) + ": empty interval");
      if (i > 0 && pieces_[i].from != pieces_[i - 1].to)
        throw ValidationError("piece " + std::to_string(i) + ": does not start where piece " +
                              std::to_string(i - 1) + " ends");
      if (auto* p = std::get_if<form::Power>(&pieces_[i].form); p && !(p->exponent > 0.0))
        throw ValidationError("piece " + std::to_string(i) + ": power exponent must be > 0");
    }
    left_ = detail::form_tail(pieces_.front().form, -1);
    right_ = detail::form_tail(pieces_.back().form, 1);
  }

  PiecewiseFn(std::function<double(double)> fn, Tail left, Tail right)
      : callback_(std::move(fn)), left_(left), right_(right) {
    if (!callback_) throw ValidationError("empty callback");
  }

  bool is_callback() const { return static_cast<bool>(callback_); }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const Tail& left_tail() const { return left_; }
  const Tail& right_tail() const { return right_; }

  double operator()(double x) const {
    if (callback_) return callback_(x);
    return eval_form(pieces_[piece_index(x)].form, x);
  }

  /// lim f(y) as y -> x from below.
  double left_limit(double x) const {
    if (callback_) return callback_(std::nextafter(x, -kInf));
    for (std::size_t i = 0; i < pieces_.size(); ++i)
      if (pieces_[i].from < x && x <= pieces_[i].to) return eval_form(pieces_[i].form, x);
    return (*this)(x);
  }

  /// True when x falls on a piece whose form is an infinite constant.
  bool infinite_form_at(double x) const {
    if (callback_) return false;
    const Form& f = pieces_[piece_index(x)].form;
    return std::holds_alternative<form::NegInfinity>(f) || std::holds_alternative<form::PosInfinity>(f);
  }

  /// Finite interior junction points.
  std::vector<double> junctions() const {
    std::vector<double> j;
    for (std::size_t i = 1; i < pieces_.size(); ++i) j.push_back(pieces_[i].from);
    return j;
  }

  /// Generalized inverse inf{x : f(x) >= y} of a nondecreasing function.
  double inverse(double y) const {
    if (callback_) return inverse_by_bisection(y);
    for (const Piece& pc : pieces_) {
      double top = pc.to == kInf ? limit_at(pc.form, 1) : eval_form(pc.form, pc.to);
      if (top < y) continue;
      double bottom = pc.from == -kInf ? limit_at(pc.form, -1) : eval_form(pc.form, pc.from);
      if (bottom >= y) return pc.from;
      double x = solve_form(pc.form, y);
      if (std::isnan(x)) x = pc.from;
      return std::clamp(x, pc.from, pc.to);
    }
    return kInf;
  }

 private:
  std::size_t piece_index(double x) const {
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
      if (x < pieces_[i].to) return i;
    return pieces_.size() - 1;
  }

  static double limit_at(const Form& f, int direction) {
    Tail t = detail::form_tail(f, direction);
    if (t.infinite != 0) return t.infinite * kInf;
    if (t.coef == 0.0) return 0.0;
    if (t.rate > 0.0 || t.power > 0.0) return detail::sign_of(t.coef) * kInf;
    return t.coef;
  }

  // x with f(x) = y inside a strictly monotone form; NaN when flat.
  static double solve_form(const Form& f, double y) {
    return std::visit(
        [y](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, form::Linear>) {
            return g.slope == 0.0 ? std::nan("") : (y - g.intercept) / g.slope;
          } else if constexpr (std::is_same_v<T, form::Power>) {
            if (g.scale == 0.0) return std::nan("");
            double r = y / g.scale;
            double m = std::pow(std::abs(r), 1.0 / g.exponent);
            return r >= 0.0 ? m : -m;
          } else if constexpr (std::is_same_v<T, form::Exponential>) {
            if (g.amplitude == 0.0 || g.rate == 0.0) return std::nan("");
            double inner = 1.0 - (y - g.offset) / g.amplitude;
            if (inner <= 0.0) return std::nan("");
            return -std::log(inner) / g.rate;
          } else {
            return std::nan("");
          }
        },
        f);
  }

  double inverse_by_bisection(double y) const {
    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (callback_(lo) >= y && guard++ < 80) lo *= 2.0;
    if (callback_(lo) >= y) return -kInf;
    guard = 0;
    while (callback_(hi) < y && guard++ < 80) hi *= 2.0;
    if (callback_(hi) < y) return kInf;
    for (int it = 0; it < 300 && hi - lo > 1e-10 * std::max(1.0, std::abs(hi)); ++it) {
      double mid = 0.5 * (lo + hi);
      (callback_(mid) >= y ? hi : lo) = mid;
    }
    return hi;
  }

  std::vector<Piece> pieces_;
  std::function<double(double)> callback_;
  Tail left_;
  Tail right_;
};

namespace detail {

// 0 and ±10^s for 50 exponents s in [-3, 3], plus junctions and their neighbours.
inline std::vector<double> probe_grid(const PiecewiseFn& f) {
  std::vector<double> g{0.0};
  for (int k = 0; k < 50; ++k) {
    double v = std::pow(10.0, -3.0 + 6.0 * k / 49.0);
    g.push_back(v);
    g.push_back(-v);
  }
  for (double j : f.junctions()) {
    g.push_back(j);
    g.push_back(j - 1e-3);
    g.push_back(j + 1e-3);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline bool close_le(double a, double b) {
  if (a <= b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return a - b <= 1e-9 * (1.0 + std::abs(a) + std::abs(b));
}

inline bool nondecreasing(const PiecewiseFn& f, const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!close_le(f(grid[i - 1]), f(grid[i]))) return false;
  for (double j : f.junctions())
    if (!close_le(f.left_limit(j), f(j))) return false;
  return true;
}

// Midpoint concavity on consecutive triples with finite values.
inline bool concave_on(const PiecewiseFn& f, const std::vector<double>& pts) {
  for (std::size_t i = 2; i < pts.size(); ++i) {
    double a = pts[i - 2], b = pts[i - 1], c = pts[i];
    double fa = f(a), fb = f(b), fc = f(c);
    if (!std::isfinite(fb) || !std::isfinite(fc)) continue;
    if (!std::isfinite(fa)) continue;  // -inf to the left is compatible with concavity
    double t = (b - a) / (c - a);
    if (!close_le((1 - t) * fa + t * fc, fb)) return false;
  }
  return true;
}

inline bool convex_on(const PiecewiseFn& f, const std::vector<double>& pts) {
  for (std::size_t i = 2; i < pts.size(); ++i) {
    double a = pts[i - 2], b = pts[i - 1], c = pts[i];
    double fa = f(a), fb = f(b), fc = f(c);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fc)) continue;
    double t = (b - a) / (c - a);
    if (!close_le(fb, (1 - t) * fa + t * fc)) return false;
  }
  return true;
}

// f(x)/x nonincreasing (sign = -1) or nondecreasing (sign = +1) along pts (all of one sign).
inline bool ratio_monotone(const PiecewiseFn& f, const std::vector<double>& pts, int sign) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double r0 = f(pts[i - 1]) / pts[i - 1];
    double r1 = f(pts[i]) / pts[i];
    if (sign < 0 ? !close_le(r1, r0) : !close_le(r0, r1)) return false;
  }
  return true;
}

inline std::vector<double> positive_part(const std::vector<double>& g) {
  std::vector<double> out;
  for (double x : g)
    if (x > 0.0) out.push_back(x);
  return out;
}

inline std::vector<double> negative_part(const std::vector<double>& g) {
  std::vector<double> out;
  for (double x : g)
    if (x < 0.0) out.push_back(x);
  return out;
}

}  // namespace detail

/// Optional properties of a utility function. Unset means "not claimed".
struct UtilityFlags {
  bool concave_on_pos = false;
  bool concave = false;
  bool neg_star_shaped_on_pos = false;
  bool neg_star_shaped = false;  // u(t x) <= t u(x) for every x and t > 1
  bool below_identity = false;
  bool strictly_negative_on_neg = false;
  bool left_continuous_at_0 = false;
};

/// Increasing u with u(0) = 0 that is not superlinear at +inf.
class UtilityFn {
 public:
  /// Flags default to whatever the grid probe detects; declared flags are probed and rejected if false.
  explicit UtilityFn(PiecewiseFn fn, std::optional<UtilityFlags> declared = std::nullopt, std::string name = "")
      : fn_(std::move(fn)), name_(std::move(name)) {
    if (fn_.right_tail().infinite != 0) throw ValidationError("utility cannot be infinite at +inf");
    for (const Piece& p : fn_.pieces())
      if (std::holds_alternative<form::PosInfinity>(p.form))
        throw ValidationError("utility cannot take the value +inf");
    auto grid = detail::probe_grid(fn_);
    if (!detail::nondecreasing(fn_, grid)) throw ValidationError("utility must be increasing");
    if (fn_(0.0) != 0.0) throw ValidationError("utility must satisfy u(0) = 0");
    if (slope_at_infinity(fn_.right_tail(), 1) == kInf)
      throw ValidationError("utility is superlinear at +inf");
    UtilityFlags found = detect(grid);
    if (declared) {
      check_declared(declared->concave_on_pos, found.concave_on_pos, "concave_on_pos");
      check_declared(declared->concave, found.concave, "concave");
      check_declared(declared->neg_star_shaped_on_pos, found.neg_star_shaped_on_pos, "neg_star_shaped_on_pos");
      check_declared(declared->neg_star_shaped, found.neg_star_shaped, "neg_star_shaped");
      check_declared(declared->below_identity, found.below_identity, "below_identity");
      check_declared(declared->strictly_negative_on_neg, found.strictly_negative_on_neg,
                     "strictly_negative_on_neg");
      check_declared(declared->left_continuous_at_0, found.left_continuous_at_0, "left_continuous_at_0");
      flags_ = *declared;
    } else {
      flags_ = found;
    }
  }

  explicit UtilityFn(std::vector<Piece> pieces, std::optional<UtilityFlags> declared = std::nullopt,
                     std::string name = "")
      : UtilityFn(PiecewiseFn(std::move(pieces)), declared, std::move(name)) {}

  double operator()(double x) const { return fn_(x); }
  double inverse(double y) const { return fn_.inverse(y); }
  const PiecewiseFn& fn() const { return fn_; }
  const UtilityFlags& flags() const { return flags_; }
  const std::string& name() const { return name_; }

  /// limsup u(-x)/u(x) as x -> inf.
  double loss_gain_ratio() const { return asymptotic_ratio(fn_.left_tail(), fn_.right_tail()); }
  /// lim u(x)/x as x -> -inf.
  double slope_at_minus_infinity() const { return slope_at_infinity(fn_.left_tail(), -1); }
  /// lim u(x)/x as x -> +inf.
  double slope_at_plus_infinity() const { return slope_at_infinity(fn_.right_tail(), 1); }

 private:
  static void check_declared(bool declared, bool holds, const char* name) {
    if (declared && !holds) throw ValidationError(std::string("declared utility flag fails grid probe: ") + name);
  }

  UtilityFlags detect(const std::vector<double>& grid) const {
    UtilityFlags f;
    auto pos = detail::positive_part(grid);
    auto neg = detail::negative_part(grid);
    std::vector<double> nonneg{0.0};
    nonneg.insert(nonneg.end(), pos.begin(), pos.end());
    f.concave_on_pos = detail::concave_on(fn_, nonneg);
    f.concave = detail::concave_on(fn_, grid);
    f.neg_star_shaped_on_pos = detail::ratio_monotone(fn_, pos, -1);
    f.neg_star_shaped = f.neg_star_shaped_on_pos && detail::ratio_monotone(fn_, neg, -1);
    f.below_identity = true;
    for (double x : grid)
      if (!detail::close_le(fn_(x), x)) f.below_identity = false;
    f.strictly_negative_on_neg = fn_(-1e-9) < 0.0;
    for (double x : neg)
      if (!(fn_(x) < 0.0)) f.strictly_negative_on_neg = false;
    f.left_continuous_at_0 = fn_.left_limit(0.0) == fn_(0.0);
    return f;
  }

  PiecewiseFn fn_;
  UtilityFlags flags_;
  std::string name_;
};

struct LossFlags {
  bool positive_on_pos = false;         // l(x) > 0 for x > 0
  bool pos_star_shaped_on_neg = false;  // l(t x) >= t l(x) for x <= 0, t > 1
  bool star_shaped = false;             // l(t x) <= t l(x) for every x, t in [0,1]
  bool convex = false;
};

/// Increasing l with l(0) = 0 and limsup l(x)/x < inf as x -> -inf.
class LossFn {
 public:
  explicit LossFn(PiecewiseFn fn, std::optional<LossFlags> declared = std::nullopt, std::string name = "")
      : fn_(std::move(fn)), name_(std::move(name)) {
    if (fn_.left_tail().infinite != 0) throw ValidationError("loss function cannot be infinite at -inf");
    for (const Piece& p : fn_.pieces())
      if (std::holds_alternative<form::NegInfinity>(p.form))
        throw ValidationError("loss function cannot take the value -inf");
    auto grid = detail::probe_grid(fn_);
    if (!detail::nondecreasing(fn_, grid)) throw ValidationError("loss function must be increasing");
    if (fn_(0.0) != 0.0) throw ValidationError("loss function must satisfy l(0) = 0");
    if (slope_at_infinity(fn_.left_tail(), -1) == kInf)
      throw ValidationError("loss function violates limsup l(x)/x < inf at -inf");
    LossFlags found = detect(grid);
    if (declared) {
      auto chk = [](bool d, bool h, const char* n) {
        if (d && !h) throw ValidationError(std::string("declared loss flag fails grid probe: ") + n);
      };
      chk(declared->positive_on_pos, found.positive_on_pos, "positive_on_pos");
      chk(declared->pos_star_shaped_on_neg, found.pos_star_shaped_on_neg, "pos_star_shaped_on_neg");
      chk(declared->star_shaped, found.star_shaped, "star_shaped");
      chk(declared->convex, found.convex, "convex");
      flags_ = *declared;
    } else {
      flags_ = found;
    }
  }

  explicit LossFn(std::vector<Piece> pieces, std::optional<LossFlags> declared = std::nullopt,
                  std::string name = "")
      : LossFn(PiecewiseFn(std::move(pieces)), declared, std::move(name)) {}

  double operator()(double x) const { return fn_(x); }
  const PiecewiseFn& fn() const { return fn_; }
  const LossFlags& flags() const { return flags_; }
  const std::string& name() const { return name_; }

  /// limsup l(x)/l(-x) as x -> inf.
  double gain_loss_ratio() const { return asymptotic_ratio(fn_.right_tail(), fn_.left_tail()); }

 private:
  LossFlags detect(const std::vector<double>& grid) const {
    LossFlags f;
    auto pos = detail::positive_part(grid);
    auto neg = detail::negative_part(grid);
    f.positive_on_pos = fn_(1e-9) > 0.0;
    for (double x : pos)
      if (!(fn_(x) > 0.0)) f.positive_on_pos = false;
    f.pos_star_shaped_on_neg = detail::ratio_monotone(fn_, neg, 1);
    f.star_shaped = f.pos_star_shaped_on_neg && detail::ratio_monotone(fn_, pos, 1);
    f.convex = detail::convex_on(fn_, grid);
    return f;
  }

  PiecewiseFn fn_;
  LossFlags flags_;
  std::string name_;
};

// ---- catalog ---------------------------------------------------------------

/// (1 - e^{-gamma x}) / gamma.
inline UtilityFn exponential_utility(double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("exponential utility needs gamma > 0");
  return UtilityFn({Piece{-kInf, kInf, form::Exponential{1.0 / gamma, gamma, 0.0}}}, std::nullopt,
                   "exp:" + std::to_string(gamma));
}

/// x^a for x >= 0, -(-x)^b for x < 0.
inline UtilityFn power_s_utility(double a, double b) {
  if (!(a > 0.0 && a <= 1.0 && b > 0.0)) throw ParameterError("power S-shape needs 0 < a <= 1 and b > 0");
  return UtilityFn({Piece{-kInf, 0.0, form::Power{1.0, b}}, Piece{0.0, kInf, form::Power{1.0, a}}}, std::nullopt,
                   "power-s");
}

inline UtilityFn linear_utility() {
  return UtilityFn({Piece{-kInf, kInf, form::Linear{1.0, 0.0}}}, std::nullopt, "linear");
}

/// x^a above 1, x on [0,1], beta * x below 0, with 0 < a < 1 <= beta.
inline UtilityFn oce_remark_utility(double a = 0.5, double beta = 2.0) {
  if (!(a > 0.0 && a < 1.0 && beta >= 1.0)) throw ParameterError("needs 0 < a < 1 <= beta");
  return UtilityFn({Piece{-kInf, 0.0, form::Linear{beta, 0.0}}, Piece{0.0, 1.0, form::Linear{1.0, 0.0}},
                    Piece{1.0, kInf, form::Power{1.0, a}}},
                   std::nullopt, "oce-remark");
}

/// e^{gamma x} - 1.
inline LossFn exponential_loss(double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("exponential loss needs gamma > 0");
  return LossFn({Piece{-kInf, kInf, form::Exponential{-1.0, -gamma, 0.0}}}, std::nullopt,
                "exp:" + std::to_string(gamma));
}

inline LossFn linear_loss() { return LossFn({Piece{-kInf, kInf, form::Linear{1.0, 0.0}}}, std::nullopt, "linear"); }

}  // namespace losssense
