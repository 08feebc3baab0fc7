#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "losssense/extended.hpp"
#include "losssense/prob_core.hpp"
#include "losssense/profiles.hpp"
#include "losssense/scalar_fn.hpp"

namespace losssense {

enum class Kind { risk, utility };

inline const char* kind_name(Kind k) { return k == Kind::risk ? "risk" : "utility"; }

/// Declared properties. star_shaped means positive star-shapedness for risk
/// functionals and negative for utility functionals; likewise convex/concave.
struct AxiomFlags {
  bool monotone = true;
  bool normalized = true;
  bool cash_additive = false;
  bool pos_homogeneous = false;
  bool star_shaped = false;
  bool convex_or_concave = false;

  friend bool operator==(const AxiomFlags&, const AxiomFlags&) = default;
};

/// Claim that the risk-oriented value of lambda*X is <= 0 for every lambda >= lambda_from.
struct RayCertificate {
  double lambda_from = 1.0;
  std::string identity;
};

using RayIdentity = std::function<std::optional<RayCertificate>(const Position&)>;

class FunctionalSpec;

namespace variant {
struct VaR {
  double alpha;
};
struct ES {
  double alpha;
};
struct LVaR {
  AlphaProfile profile;
};
struct AdjES {
  GProfile g;
};
struct Shortfall {
  LossFn loss;
};
struct Entropic {
  double gamma;
};
struct WorstCase {};
struct ExpectedUtility {
  UtilityFn u;
};
struct ClassicalCE {
  UtilityFn u;
};
struct UMeanCE {
  UtilityFn u;
};
struct OCE {
  UtilityFn u;
};
struct Custom {
  std::string name;
  std::function<Extended(const Position&)> evaluator;
  RayIdentity ray_identity;
};
/// The functional -F, with the opposite kind.
struct Negation {
  std::shared_ptr<const FunctionalSpec> inner;
};
}  // namespace variant

using SpecVariant = std::variant<variant::VaR, variant::ES, variant::LVaR, variant::AdjES, variant::Shortfall,
                                 variant::Entropic, variant::WorstCase, variant::ExpectedUtility,
                                 variant::ClassicalCE, variant::UMeanCE, variant::OCE, variant::Custom,
                                 variant::Negation>;

/// Tagged description of a risk or utility functional.
class FunctionalSpec {
 public:
  static FunctionalSpec var(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("VaR level must lie in (0,1)");
    return {variant::VaR{alpha}, Kind::risk, coherent(false)};
  }
  static FunctionalSpec es(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("ES level must lie in (0,1]");
    return {variant::ES{alpha}, Kind::risk, coherent(true)};
  }
  /// E[-X].
  static FunctionalSpec expectation() { return es(1.0); }
  static FunctionalSpec lvar(AlphaProfile profile) {
    return {variant::LVaR{std::move(profile)}, Kind::risk, {true, true, true, false, true, false}};
  }
  static FunctionalSpec adj_es(GProfile g) {
    return {variant::AdjES{std::move(g)}, Kind::risk, {true, true, true, false, true, true}};
  }
  static FunctionalSpec shortfall(LossFn loss) {
    if (!loss.flags().positive_on_pos)
      throw ParameterError("shortfall needs a loss function with l(x) > 0 for x > 0");
    bool star = loss.flags().star_shaped || loss.flags().convex;
    bool convex = loss.flags().convex;
    return {variant::Shortfall{std::move(loss)}, Kind::risk, {true, true, true, false, star, convex}};
  }
  static FunctionalSpec entropic(double gamma) {
    if (!(gamma > 0.0)) throw ParameterError("entropic risk needs gamma > 0");
    return {variant::Entropic{gamma}, Kind::risk, {true, true, true, false, true, true}};
  }
  static FunctionalSpec worst_case() { return {variant::WorstCase{}, Kind::risk, coherent(true)}; }
  static FunctionalSpec expected_utility(UtilityFn u) {
    bool concave = u.flags().concave;
    bool star = u.flags().neg_star_shaped || concave;
    return {variant::ExpectedUtility{std::move(u)}, Kind::utility, {true, true, false, false, star, concave}};
  }
  static FunctionalSpec classical_ce(UtilityFn u) {
    if (!u.flags().strictly_negative_on_neg)
      throw ParameterError("classical certainty equivalent needs u(x) < 0 for x < 0");
    return {variant::ClassicalCE{std::move(u)}, Kind::utility, {true, true, false, false, false, false}};
  }
  static FunctionalSpec umean_ce(UtilityFn u) {
    if (!u.flags().strictly_negative_on_neg)
      throw ParameterError("u-mean certainty equivalent needs u(x) < 0 for x < 0");
    return {variant::UMeanCE{std::move(u)}, Kind::utility, {true, true, true, false, false, false}};
  }
  static FunctionalSpec oce(UtilityFn u) {
    if (!u.flags().below_identity) throw ParameterError("OCE needs u(x) <= x");
    bool concave = u.flags().concave;
    return {variant::OCE{std::move(u)}, Kind::utility, {true, true, true, false, concave, concave}};
  }
  static FunctionalSpec custom(Kind kind, std::string name, std::function<Extended(const Position&)> evaluator,
                               AxiomFlags flags, RayIdentity ray_identity = {}) {
    if (!evaluator) throw ParameterError("custom functional needs an evaluator");
    return {variant::Custom{std::move(name), std::move(evaluator), std::move(ray_identity)}, kind, flags};
  }
  static FunctionalSpec negation(const FunctionalSpec& inner) {
    Kind k = inner.kind() == Kind::risk ? Kind::utility : Kind::risk;
    return {variant::Negation{std::make_shared<const FunctionalSpec>(inner)}, k, inner.flags()};
  }

  Kind kind() const { return kind_; }
  const AxiomFlags& flags() const { return flags_; }
  const SpecVariant& variant() const { return variant_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&variant_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, variant::VaR>) return "var";
          else if constexpr (std::is_same_v<T, variant::ES>) return "es";
          else if constexpr (std::is_same_v<T, variant::LVaR>) return "lvar";
          else if constexpr (std::is_same_v<T, variant::AdjES>) return "adj_es";
          else if constexpr (std::is_same_v<T, variant::Shortfall>) return "shortfall";
          else if constexpr (std::is_same_v<T, variant::Entropic>) return "entropic";
          else if constexpr (std::is_same_v<T, variant::WorstCase>) return "worstcase";
          else if constexpr (std::is_same_v<T, variant::ExpectedUtility>) return "expected_utility";
          else if constexpr (std::is_same_v<T, variant::ClassicalCE>) return "classical_ce";
          else if constexpr (std::is_same_v<T, variant::UMeanCE>) return "umean_ce";
          else if constexpr (std::is_same_v<T, variant::OCE>) return "oce";
          else if constexpr (std::is_same_v<T, variant::Custom>) return "custom:" + v.name;
          else return "negation(" + v.inner->name() + ")";
        },
        variant_);
  }

 private:
  FunctionalSpec(SpecVariant v, Kind k, AxiomFlags f) : variant_(std::move(v)), kind_(k), flags_(f) {}

  static AxiomFlags coherent(bool convex) { return {true, true, true, true, true, convex}; }

  SpecVariant variant_;
  Kind kind_;
  AxiomFlags flags_;
};

}  // namespace losssense
