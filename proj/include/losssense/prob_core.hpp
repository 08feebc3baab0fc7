#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "losssense/errors.hpp"

namespace losssense {

/// Absolute tolerance on the total mass of a space.
inline constexpr double kMassTolerance = 1e-12;

/// Atoms of a finite sample space. Immutable once built.
class FiniteSpace {
 public:
  explicit FiniteSpace(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ValidationError("probability space needs at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      double p = probs_[i];
      if (!std::isfinite(p) || p <= 0.0)
        throw ValidationError("atom " + std::to_string(i) + ": probability must be > 0, got " +
                              std::to_string(p));
      total += p;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
      throw ValidationError("probabilities sum to " + std::to_string(total) + ", expected 1");
  }

  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

using SpacePtr = std::shared_ptr<const FiniteSpace>;

inline SpacePtr make_space(std::vector<double> probs) {
  return std::make_shared<const FiniteSpace>(std::move(probs));
}

inline SpacePtr uniform_space(std::size_t n) {
  if (n == 0) throw ValidationError("probability space needs at least one atom");
  return make_space(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

/// Two-atom space {A, A^c} with P(A) = p.
inline SpacePtr binary_space(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("P(A) must lie in (0,1)");
  return make_space({p, 1.0 - p});
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && a->probs() == b->probs());
}

/// Boolean membership per atom.
class EventMask {
 public:
  EventMask() = default;
  explicit EventMask(std::vector<bool> members) : members_(std::move(members)) {}

  std::size_t size() const { return members_.size(); }
  bool contains(std::size_t i) const { return members_[i]; }
  const std::vector<bool>& members() const { return members_; }

  EventMask complement() const {
    std::vector<bool> out(members_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = !members_[i];
    return EventMask(std::move(out));
  }

  double probability(const FiniteSpace& space) const {
    check(space);
    double p = 0.0;
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (members_[i]) p += space.prob(i);
    return p;
  }

  void check(const FiniteSpace& space) const {
    if (members_.size() != space.size())
      throw ValidationError("event mask has " + std::to_string(members_.size()) +
                            " entries, space has " + std::to_string(space.size()));
  }

 private:
  std::vector<bool> members_;
};

/// A random variable on a finite space, as an outcome vector aligned with the atoms.
class Position {
 public:
  Position(SpacePtr space, std::vector<double> outcomes)
      : space_(std::move(space)), outcomes_(std::move(outcomes)) {
    if (!space_) throw ValidationError("position without a probability space");
    if (outcomes_.size() != space_->size())
      throw ValidationError("position has " + std::to_string(outcomes_.size()) +
                            " outcomes, space has " + std::to_string(space_->size()) + " atoms");
    for (std::size_t i = 0; i < outcomes_.size(); ++i)
      if (!std::isfinite(outcomes_[i]))
        throw ValidationError("atom " + std::to_string(i) + ": outcome must be finite");
  }

  static Position constant(SpacePtr space, double c) {
    std::size_t n = space ? space->size() : 0;
    return Position(std::move(space), std::vector<double>(n, c));
  }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return outcomes_.size(); }
  double outcome(std::size_t i) const { return outcomes_[i]; }
  double prob(std::size_t i) const { return space_->prob(i); }
  const std::vector<double>& outcomes() const { return outcomes_; }

 private:
  SpacePtr space_;
  std::vector<double> outcomes_;
};

inline void require_same_space(const Position& a, const Position& b) {
  if (!same_space(a.space(), b.space())) throw SpaceMismatch();
}

inline double expectation(const Position& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.prob(i) * x.outcome(i);
  return s;
}

/// ess sup(-X): the largest loss.
inline double ess_sup_neg(const Position& x) {
  return -*std::min_element(x.outcomes().begin(), x.outcomes().end());
}

inline double ess_inf(const Position& x) { return *std::min_element(x.outcomes().begin(), x.outcomes().end()); }
inline double ess_sup(const Position& x) { return *std::max_element(x.outcomes().begin(), x.outcomes().end()); }

inline double sup_norm(const Position& x) {
  double m = 0.0;
  for (double v : x.outcomes()) m = std::max(m, std::abs(v));
  return m;
}

/// P(X < 0).
inline double prob_negative(const Position& x) {
  double p = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x.outcome(i) < 0.0) p += x.prob(i);
  return p;
}

inline bool has_losses(const Position& x) { return ess_inf(x) < 0.0; }

inline bool is_constant(const Position& x) { return ess_inf(x) == ess_sup(x); }

/// Distinct outcomes in ascending order with their masses and cumulative masses.
struct SortedLaw {
  std::vector<double> values;
  std::vector<double> masses;
  std::vector<double> cumulative;  // P(X <= values[k])
};

inline SortedLaw sorted_law(const Position& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return x.outcome(a) < x.outcome(b); });
  SortedLaw law;
  for (std::size_t i : idx) {
    if (!law.values.empty() && law.values.back() == x.outcome(i)) {
      law.masses.back() += x.prob(i);
    } else {
      law.values.push_back(x.outcome(i));
      law.masses.push_back(x.prob(i));
    }
  }
  double c = 0.0;
  for (double m : law.masses) {
    c += m;
    law.cumulative.push_back(c);
  }
  law.cumulative.back() = 1.0;  // absorb summation dust on the last atom
  return law;
}

/// Value at Risk at level alpha in (0,1): negated upper alpha-quantile.
inline double var(const Position& x, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("VaR level must lie in (0,1)");
  SortedLaw law = sorted_law(x);
  for (std::size_t k = 0; k < law.values.size(); ++k)
    if (law.cumulative[k] > alpha + kMassTolerance) return 0.0 - law.values[k];  // +0, not -0, at a zero outcome
  return 0.0 - law.values.back();
}

/// VaR at level 0, i.e. the worst loss.
inline double var0(const Position& x) { return ess_sup_neg(x); }

/// Expected Shortfall at level alpha in (0,1]: mean of the worst alpha-mass.
inline double es(const Position& x, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("ES level must lie in (0,1]");
  SortedLaw law = sorted_law(x);
  double remaining = alpha;
  double acc = 0.0;
  for (std::size_t k = 0; k < law.values.size() && remaining > 0.0; ++k) {
    double w = std::min(law.masses[k], remaining);
    acc += w * law.values[k];
    remaining -= w;
  }
  // remaining > 0 only when alpha exceeds the summed mass by rounding
  if (remaining > 0.0) acc += remaining * law.values.back();
  return -acc / alpha;
}

/// On [lo, hi] the map alpha -> ES_alpha(X) equals v + c / alpha.
struct EsPiece {
  double lo;
  double hi;
  double v;
  double c;
};

inline std::vector<EsPiece> es_pieces(const Position& x) {
  SortedLaw law = sorted_law(x);
  std::vector<EsPiece> pieces;
  double prev_cum = 0.0;
  double partial = 0.0;  // sum of p_j x_j over worse atoms
  for (std::size_t k = 0; k < law.values.size(); ++k) {
    double xk = law.values[k];
    pieces.push_back({prev_cum, law.cumulative[k], -xk, xk * prev_cum - partial});
    partial += law.masses[k] * xk;
    prev_cum = law.cumulative[k];
  }
  return pieces;
}

/// lambda * X + m.
inline Position scale_add(const Position& x, double lambda, double m) {
  std::vector<double> out(x.outcomes());
  for (double& v : out) v = lambda * v + m;
  return Position(x.space(), std::move(out));
}

inline Position indicator(const SpacePtr& space, const EventMask& a) {
  a.check(*space);
  std::vector<double> out(space->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.contains(i) ? 1.0 : 0.0;
  return Position(space, std::move(out));
}

/// X * 1_A.
inline Position restrict(const Position& x, const EventMask& a) {
  a.check(*x.space());
  std::vector<double> out(x.outcomes());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!a.contains(i)) out[i] = 0.0;
  return Position(x.space(), std::move(out));
}

inline Position operator+(const Position& a, const Position& b) {
  require_same_space(a, b);
  std::vector<double> out(a.outcomes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.outcome(i);
  return Position(a.space(), std::move(out));
}

inline Position operator-(const Position& a, const Position& b) {
  require_same_space(a, b);
  std::vector<double> out(a.outcomes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.outcome(i);
  return Position(a.space(), std::move(out));
}

inline Position operator+(const Position& a, double m) { return scale_add(a, 1.0, m); }
inline Position operator-(const Position& a, double m) { return scale_add(a, 1.0, -m); }
inline Position operator*(double lambda, const Position& a) { return scale_add(a, lambda, 0.0); }
inline Position operator-(const Position& a) { return scale_add(a, -1.0, 0.0); }

/// Position c_A * 1_A + c_Ac * 1_{A^c} on the two-atom space with P(A) = p.
inline Position binary_position(double p, double on_a, double off_a) {
  return Position(binary_space(p), {on_a, off_a});
}

/// Event {i : pred(x_i)}.
template <class Pred>
EventMask event_where(const Position& x, Pred pred) {
  std::vector<bool> m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) m[i] = pred(x.outcome(i));
  return EventMask(std::move(m));
}

}  // namespace losssense
