#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace losssense {

/// Real number extended by +inf / -inf.
///
/// Infinite values are explicit states. `from_double` turns a raw floating
/// infinity into a sentinel and marks it as overflowed, so callers can tell a
/// structural infinity (e.g. u = -inf on a piece) from a rounding blow-up.
class Extended {
 public:
  enum class State { finite, plus_infinity, minus_infinity };

  constexpr Extended() = default;

  static constexpr Extended finite(double v) { return Extended(State::finite, v, false); }
  static constexpr Extended plus_infinity() {
    return Extended(State::plus_infinity, std::numeric_limits<double>::infinity(), false);
  }
  static constexpr Extended minus_infinity() {
    return Extended(State::minus_infinity, -std::numeric_limits<double>::infinity(), false);
  }

  static Extended from_double(double v) {
    if (std::isnan(v)) throw std::domain_error("evaluation produced NaN");
    if (std::isinf(v)) return Extended(v > 0 ? State::plus_infinity : State::minus_infinity, v, true);
    return finite(v);
  }

  State state() const { return state_; }
  bool is_finite() const { return state_ == State::finite; }
  bool is_plus_infinity() const { return state_ == State::plus_infinity; }
  bool is_minus_infinity() const { return state_ == State::minus_infinity; }
  bool overflowed() const { return overflowed_; }

  /// IEEE view of the value (±inf for sentinels).
  double value() const { return value_; }

  Extended operator-() const {
    State s = state_ == State::plus_infinity    ? State::minus_infinity
              : state_ == State::minus_infinity ? State::plus_infinity
                                                : State::finite;
    return Extended(s, -value_, overflowed_);
  }

  /// Shift by a finite amount; sentinels absorb it.
  Extended shifted(double m) const {
    if (!is_finite()) return *this;
    return from_double(value_ + m);
  }

  /// Divide by a positive scalar; sentinels are preserved.
  Extended divided(double lambda) const {
    if (!is_finite()) return *this;
    return from_double(value_ / lambda);
  }

  std::string to_string() const {
    if (is_plus_infinity()) return "inf";
    if (is_minus_infinity()) return "-inf";
    return std::to_string(value_);
  }

  friend bool operator==(const Extended& a, const Extended& b) {
    return a.state_ == b.state_ && (a.state_ != State::finite || a.value_ == b.value_);
  }
  friend bool operator<(const Extended& a, const Extended& b) { return a.value_ < b.value_; }
  friend bool operator>(const Extended& a, const Extended& b) { return b < a; }
  friend bool operator<=(const Extended& a, const Extended& b) { return !(b < a); }
  friend bool operator>=(const Extended& a, const Extended& b) { return !(a < b); }

 private:
  constexpr Extended(State s, double v, bool o) : state_(s), value_(v), overflowed_(o) {}

  State state_ = State::finite;
  double value_ = 0.0;
  bool overflowed_ = false;
};

}  // namespace losssense
