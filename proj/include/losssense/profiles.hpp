#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "losssense/errors.hpp"
#include "losssense/scalar_fn.hpp"

namespace losssense {

/// Step function alpha(l) for l <= 0, used by the loss VaR.
///
/// Breakpoint k holds on [loss_k, loss_{k+1}); the last one holds on [loss_last, 0].
/// Below the first breakpoint alpha equals `alpha_inf`, the declared limit at -inf.
class AlphaProfile {
 public:
  struct Breakpoint {
    double loss;
    double alpha;
  };

  AlphaProfile(std::vector<Breakpoint> breakpoints, double alpha_inf)
      : breakpoints_(std::move(breakpoints)), alpha_inf_(alpha_inf) {
    if (breakpoints_.empty()) throw ParameterError("alpha profile needs at least one breakpoint");
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
      const auto& b = breakpoints_[k];
      std::string at = "alpha profile breakpoint " + std::to_string(k) + ": ";
      if (!std::isfinite(b.loss) || b.loss > 0.0) throw ParameterError(at + "loss level must be finite and <= 0");
      if (!(b.alpha >= 0.0 && b.alpha < 1.0)) throw ParameterError(at + "alpha must lie in [0,1)");
      if (k > 0 && !(b.loss > breakpoints_[k - 1].loss)) throw ParameterError(at + "loss levels must increase");
      if (k > 0 && b.alpha < breakpoints_[k - 1].alpha) throw ParameterError(at + "alpha must be nondecreasing");
    }
    if (!(alpha_inf_ >= 0.0 && alpha_inf_ <= breakpoints_.front().alpha))
      throw ParameterError("alpha_inf must lie in [0, first alpha]");
  }

  /// alpha(l) == alpha0 for every l.
  static AlphaProfile constant(double alpha0) { return AlphaProfile({{0.0, alpha0}}, alpha0); }

  /// Samples of f on n equispaced levels in [lo, 0] with declared limit alpha_inf.
  template <class F>
  static AlphaProfile sampled(F f, double lo, std::size_t n, double alpha_inf) {
    std::vector<Breakpoint> b;
    for (std::size_t k = 0; k < n; ++k) {
      double l = n == 1 ? 0.0 : lo + (0.0 - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
      b.push_back({l, f(l)});
    }
    return AlphaProfile(std::move(b), alpha_inf);
  }

  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  double alpha_inf() const { return alpha_inf_; }

  double operator()(double loss) const {
    if (loss < breakpoints_.front().loss) return alpha_inf_;
    double a = breakpoints_.front().alpha;
    for (const auto& b : breakpoints_)
      if (loss >= b.loss) a = b.alpha;
    return a;
  }

 private:
  std::vector<Breakpoint> breakpoints_;
  double alpha_inf_;
};

/// Decreasing risk profile g on (0,1] with g(1) = 0, equal to +inf on (0, p).
///
/// The finite part interpolates `points` linearly; when p = 0 it is extended
/// to the left of the first point by its value.
class GProfile {
 public:
  struct Point {
    double alpha;
    double g;
  };

  GProfile(double inf_prefix, std::vector<Point> points) : p_(inf_prefix), points_(std::move(points)) {
    if (!(p_ >= 0.0 && p_ <= 1.0)) throw ParameterError("g profile: infinite prefix must lie in [0,1]");
    if (points_.empty()) throw ParameterError("g profile needs at least one point");
    for (std::size_t k = 0; k < points_.size(); ++k) {
      const auto& q = points_[k];
      std::string at = "g profile point " + std::to_string(k) + ": ";
      if (!(q.alpha > 0.0 && q.alpha <= 1.0)) throw ParameterError(at + "alpha must lie in (0,1]");
      if (!std::isfinite(q.g)) throw ParameterError(at + "g must be finite");
      if (k > 0 && !(q.alpha > points_[k - 1].alpha)) throw ParameterError(at + "alpha must increase");
      if (k > 0 && q.g > points_[k - 1].g) throw ParameterError(at + "g must be nonincreasing");
    }
    if (points_.back().alpha != 1.0 || points_.back().g != 0.0)
      throw ParameterError("g profile must end at g(1) = 0");
    if (p_ > 0.0 && points_.front().alpha != p_)
      throw ParameterError("g profile: first point must sit at the infinite prefix");
  }

  /// g = 0 on [alpha0, 1], +inf below: ES^g reduces to ES_{alpha0}.
  static GProfile es_level(double alpha0) {
    if (alpha0 == 1.0) return GProfile(1.0, {{1.0, 0.0}});
    return GProfile(alpha0, {{alpha0, 0.0}, {1.0, 0.0}});
  }

  double inf_prefix() const { return p_; }
  bool finite_everywhere() const { return p_ == 0.0; }
  const std::vector<Point>& points() const { return points_; }

  double operator()(double alpha) const {
    if (alpha < p_) return kInf;
    if (alpha <= points_.front().alpha) return points_.front().g;
    for (std::size_t k = 1; k < points_.size(); ++k) {
      if (alpha <= points_[k].alpha) {
        const auto& a = points_[k - 1];
        const auto& b = points_[k];
        double t = (alpha - a.alpha) / (b.alpha - a.alpha);
        return a.g + t * (b.g - a.g);
      }
    }
    return 0.0;
  }

  /// g = intercept + slope * alpha on [lo, hi].
  struct LinearPiece {
    double lo, hi, intercept, slope;
  };

  std::vector<LinearPiece> linear_pieces() const {
    std::vector<LinearPiece> out;
    if (p_ == 0.0 && points_.front().alpha > 0.0) out.push_back({0.0, points_.front().alpha, points_.front().g, 0.0});
    for (std::size_t k = 1; k < points_.size(); ++k) {
      const auto& a = points_[k - 1];
      const auto& b = points_[k];
      double slope = (b.g - a.g) / (b.alpha - a.alpha);
      out.push_back({a.alpha, b.alpha, a.g - slope * a.alpha, slope});
    }
    return out;
  }

 private:
  double p_;
  std::vector<Point> points_;
};

}  // namespace losssense
