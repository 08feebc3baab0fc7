#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "losssense/prob_core.hpp"

namespace losssense {

/// Seeded generator shared by samplers and randomized checks.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }
  bool coin() { return integer(0, 1) == 1; }

  /// Uniform draw from the probability simplex with n vertices.
  std::vector<double> simplex(std::size_t n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (double& v : w) {
      v = exponential() + 1e-12;
      s += v;
    }
    for (double& v : w) v /= s;
    return w;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Random position: atom count in [min_atoms, max_atoms], Dirichlet-uniform
/// probabilities, outcomes uniform in [lo, hi].
inline Position random_position(Rng& rng, int min_atoms = 2, int max_atoms = 8, double lo = -10.0,
                                double hi = 10.0) {
  int n = rng.integer(min_atoms, max_atoms);
  auto space = make_space(rng.simplex(static_cast<std::size_t>(n)));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.uniform(lo, hi);
  return Position(space, std::move(x));
}

/// Random position on a given space.
inline Position random_position_on(Rng& rng, const SpacePtr& space, double lo = -10.0, double hi = 10.0) {
  std::vector<double> x(space->size());
  for (double& v : x) v = rng.uniform(lo, hi);
  return Position(space, std::move(x));
}

/// Random nonconstant position.
inline Position random_nonconstant_position(Rng& rng, int min_atoms = 2, int max_atoms = 8) {
  for (;;) {
    Position x = random_position(rng, std::max(min_atoms, 2), max_atoms);
    if (!is_constant(x)) return x;
  }
}

/// Random event with at least one atom.
inline EventMask random_event(Rng& rng, std::size_t n) {
  std::vector<bool> m(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = rng.coin();
    any = any || m[i];
  }
  if (!any) m[static_cast<std::size_t>(rng.integer(0, static_cast<int>(n) - 1))] = true;
  return EventMask(std::move(m));
}

}  // namespace losssense
