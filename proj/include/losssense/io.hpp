#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "losssense/axioms.hpp"
#include "losssense/fixtures.hpp"
#include "losssense/functionals.hpp"
#include "losssense/recession.hpp"
#include "losssense/sensitivity.hpp"

namespace losssense::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// ---- scalars ---------------------------------------------------------------

/// Finite doubles as numbers, infinities as "inf" / "-inf", NaN as null.
inline json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v == 0.0 ? 0.0 : v;  // no "-0.0" in reports
}

inline json extended_json(const Extended& e) {
  if (e.is_plus_infinity()) return "inf";
  if (e.is_minus_infinity()) return "-inf";
  return num(e.value());
}

inline double read_real(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError(where + ": expected a number, \"inf\" or \"-inf\"");
}

inline double read_finite(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  double v = read_real(obj.at(key), where + "." + key);
  if (!std::isfinite(v)) throw ValidationError(where + "." + key + ": must be finite");
  return v;
}

inline double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError(where + ": '" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw ValidationError(where + ": '" + text + "' is not a number");
  return v;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(where + ": malformed JSON: " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- positions -------------------------------------------------------------

inline json position_json(const Position& x) {
  json atoms = json::array();
  for (std::size_t i = 0; i < x.size(); ++i) atoms.push_back({{"p", x.prob(i)}, {"x", num(x.outcome(i))}});
  return {{"atoms", atoms}};
}

// Row-checked construction; `label(i)` names row i in messages.
template <class Label>
Position build_position(const std::vector<double>& p, const std::vector<double>& x, Label label) {
  if (p.empty()) throw ValidationError("position has no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || !(p[i] > 0.0)) throw ValidationError(label(i) + ": probability must be > 0");
    if (p[i] > 1.0 + kMassTolerance) throw ValidationError(label(i) + ": probability exceeds 1");
    if (!std::isfinite(x[i])) throw ValidationError(label(i) + ": outcome must be finite");
    total += p[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", total);
    throw ValidationError(std::string("probabilities sum to ") + buf + ", not 1");
  }
  return Position(make_space(p), x);
}

inline Position position_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
    throw ValidationError("position JSON needs an \"atoms\" array");
  std::vector<double> p, x;
  const auto& atoms = j.at("atoms");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    std::string where = "atom " + std::to_string(i);
    p.push_back(read_finite(atoms[i], "p", where));
    x.push_back(read_finite(atoms[i], "x", where));
  }
  return build_position(p, x, [](std::size_t i) { return "atom " + std::to_string(i); });
}

/// CSV with header "p,x"; rows are numbered by file line.
inline Position position_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> p, x;
  std::vector<std::size_t> lines;
  std::size_t lineno = 0;
  bool header = false;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::string where = "row " + std::to_string(lineno);
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ValidationError(where + ": expected two comma-separated fields");
    std::string a = trim(line.substr(0, comma)), b = trim(line.substr(comma + 1));
    if (!header) {
      if (a != "p" || b != "x") throw ValidationError(where + ": header must be \"p,x\"");
      header = true;
      continue;
    }
    p.push_back(parse_number(a, where + " field p"));
    x.push_back(parse_number(b, where + " field x"));
    lines.push_back(lineno);
  }
  if (!header) throw ValidationError("CSV is empty; header \"p,x\" required");
  return build_position(p, x, [&](std::size_t i) { return "row " + std::to_string(lines[i]); });
}

/// Binary positions such as "-1_A(p=0.05)" or "X=2*1_A-0.5*1_Ac(p=0.3)".
inline Position position_from_inline(std::string s) {
  // accept the typographic minus and double-struck one
  for (auto [from, to] : {std::pair<std::string, std::string>{"\xE2\x88\x92", "-"}, {"\xF0\x9D\x9F\x99", "1"},
                          {"1_{A^c}", "1_Ac"}, {" ", ""}}) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos)) s.replace(pos, from.size(), to);
  }
  const std::string where = "inline position '" + s + "'";
  if (s.rfind("X=", 0) == 0) s = s.substr(2);
  auto open = s.rfind("(p=");
  if (open == std::string::npos || s.back() != ')') throw ValidationError(where + ": expected a trailing (p=P)");
  double p = parse_number(s.substr(open + 3, s.size() - open - 4), where + " probability");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError(where + ": P(A) must lie in (0,1)");
  std::string body = s.substr(0, open);
  double on_a = 0.0, off_a = 0.0;
  std::size_t i = 0;
  if (body.empty()) throw ValidationError(where + ": no terms");
  while (i < body.size()) {
    double sign = 1.0;
    if (body[i] == '+' || body[i] == '-') {
      sign = body[i] == '-' ? -1.0 : 1.0;
      ++i;
    }
    std::size_t end = i;
    auto splits = [&](std::size_t k) {  // a sign that starts the next term, not an exponent sign
      return (body[k] == '+' || body[k] == '-') && k > i && body[k - 1] != 'e' && body[k - 1] != 'E' &&
             body[k - 1] != '*';
    };
    while (end < body.size() && !splits(end)) ++end;
    std::string term = body.substr(i, end - i);
    i = end;
    double coef = 1.0;
    std::string ind = term;
    if (auto star = term.find('*'); star != std::string::npos) {
      coef = parse_number(term.substr(0, star), where + " coefficient");
      ind = term.substr(star + 1);
    }
    if (ind == "1_A") on_a += sign * coef;
    else if (ind == "1_Ac") off_a += sign * coef;
    else if (term.find('*') == std::string::npos && !term.empty()) {
      double c = parse_number(term, where + " constant");
      on_a += sign * c;
      off_a += sign * c;
    } else {
      throw ValidationError(where + ": unknown term '" + term + "'");
    }
  }
  return binary_position(p, on_a, off_a);
}

/// A path to a .json / .csv file, or an inline binary position.
inline Position load_position(const std::string& arg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) {
    std::string text = read_file(arg);
    if (fs::path(arg).extension() == ".csv") return position_from_csv(text);
    return position_from_json(parse_json_text(text, arg));
  }
  if (arg.find("1_A") != std::string::npos || arg.find("\xF0\x9D\x9F\x99") != std::string::npos)
    return position_from_inline(arg);
  if (!arg.empty() && arg.front() == '{') return position_from_json(parse_json_text(arg, "position"));
  throw ValidationError("position '" + arg + "' is neither a file nor an inline position");
}

// ---- scalar functions ------------------------------------------------------

inline json form_json(const Form& f) {
  return std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, form::Linear>) return {{"type", "linear"}, {"slope", g.slope}, {"intercept", g.intercept}};
        else if constexpr (std::is_same_v<T, form::Power>) return {{"type", "power"}, {"scale", g.scale}, {"exponent", g.exponent}};
        else if constexpr (std::is_same_v<T, form::Exponential>)
          return {{"type", "exponential"}, {"amplitude", g.amplitude}, {"rate", g.rate}, {"offset", g.offset}};
        else if constexpr (std::is_same_v<T, form::Constant>) return {{"type", "constant"}, {"value", g.value}};
        else if constexpr (std::is_same_v<T, form::NegInfinity>) return {{"type", "neg_inf"}};
        else return {{"type", "pos_inf"}};
      },
      f);
}

inline Form form_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw ValidationError(where + ": form needs a string \"type\"");
  auto t = j.at("type").get<std::string>();
  if (t == "linear") return form::Linear{read_finite(j, "slope", where), read_finite(j, "intercept", where)};
  if (t == "power") return form::Power{read_finite(j, "scale", where), read_finite(j, "exponent", where)};
  if (t == "exponential")
    return form::Exponential{read_finite(j, "amplitude", where), read_finite(j, "rate", where),
                             read_finite(j, "offset", where)};
  if (t == "constant") return form::Constant{read_finite(j, "value", where)};
  if (t == "neg_inf") return form::NegInfinity{};
  if (t == "pos_inf") return form::PosInfinity{};
  throw ValidationError(where + ": unknown form type '" + t + "'");
}

inline json pieces_json(const PiecewiseFn& f) {
  json out = json::array();
  for (const auto& p : f.pieces()) out.push_back({{"from", num(p.from)}, {"to", num(p.to)}, {"form", form_json(p.form)}});
  return out;
}

inline std::vector<Piece> pieces_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("pieces") || !j.at("pieces").is_array())
    throw ValidationError(where + ": needs a \"pieces\" array");
  std::vector<Piece> out;
  const auto& arr = j.at("pieces");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string w = where + ".pieces[" + std::to_string(i) + "]";
    const auto& pj = arr[i];
    if (!pj.is_object() || !pj.contains("from") || !pj.contains("to") || !pj.contains("form"))
      throw ValidationError(w + ": needs from, to and form");
    out.push_back({read_real(pj.at("from"), w + ".from"), read_real(pj.at("to"), w + ".to"),
                   form_from_json(pj.at("form"), w + ".form")});
  }
  try {
    PiecewiseFn check(out);
    (void)check;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return out;
}

inline json utility_flags_json(const UtilityFlags& f) {
  return {{"concave_on_pos", f.concave_on_pos},
          {"concave", f.concave},
          {"neg_star_shaped_on_pos", f.neg_star_shaped_on_pos},
          {"neg_star_shaped", f.neg_star_shaped},
          {"below_identity", f.below_identity},
          {"strictly_negative_on_neg", f.strictly_negative_on_neg},
          {"left_continuous_at_0", f.left_continuous_at_0}};
}

inline json loss_flags_json(const LossFlags& f) {
  return {{"positive_on_pos", f.positive_on_pos},
          {"pos_star_shaped_on_neg", f.pos_star_shaped_on_neg},
          {"star_shaped", f.star_shaped},
          {"convex", f.convex}};
}

inline json utility_json(const UtilityFn& u) {
  return {{"name", u.name()}, {"pieces", pieces_json(u.fn())}, {"flags", utility_flags_json(u.flags())}};
}

inline json loss_json(const LossFn& l) {
  return {{"name", l.name()}, {"pieces", pieces_json(l.fn())}, {"flags", loss_flags_json(l.flags())}};
}

inline std::vector<double> preset_args(const std::string& text, const std::string& where) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    auto comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma - start), where));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// exp:g, power-s:a,b, sqrt-s, linear, oce-remark[:a,beta].
inline UtilityFn utility_preset(const std::string& s) {
  auto colon = s.find(':');
  std::string head = s.substr(0, colon);
  auto args = preset_args(colon == std::string::npos ? "" : s.substr(colon + 1), "utility preset '" + s + "'");
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw ValidationError("utility preset '" + s + "' takes " + std::to_string(n) + " argument(s)");
  };
  try {
    if (head == "exp") return need(1), exponential_utility(args[0]);
    if (head == "power-s") return need(2), power_s_utility(args[0], args[1]);
    if (head == "sqrt-s") return need(0), power_s_utility(0.5, 0.5);
    if (head == "linear") return need(0), linear_utility();
    if (head == "oce-remark") {
      if (args.empty()) return oce_remark_utility();
      need(2);
      return oce_remark_utility(args[0], args[1]);
    }
  } catch (const ParameterError& e) {
    throw ValidationError("utility preset '" + s + "': " + e.what());
  }
  throw ValidationError("unknown utility preset '" + s + "'");
}

inline LossFn loss_preset(const std::string& s) {
  auto colon = s.find(':');
  std::string head = s.substr(0, colon);
  auto args = preset_args(colon == std::string::npos ? "" : s.substr(colon + 1), "loss preset '" + s + "'");
  try {
    if (head == "exp" && args.size() == 1) return exponential_loss(args[0]);
    if (head == "linear" && args.empty()) return linear_loss();
  } catch (const ParameterError& e) {
    throw ValidationError("loss preset '" + s + "': " + e.what());
  }
  throw ValidationError("unknown loss preset '" + s + "'");
}

inline UtilityFn utility_from_json(const json& j, const std::string& where) {
  if (j.is_string()) return utility_preset(j.get<std::string>());
  auto pieces = pieces_from_json(j, where);
  std::string name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "";
  UtilityFn detected(pieces, std::nullopt, name);
  if (!j.contains("flags")) return detected;
  // declared flags are added to the detected ones and re-probed
  UtilityFlags d = detected.flags();
  const auto& f = j.at("flags");
  auto claim = [&](const char* key, bool& slot) {
    if (f.contains(key) && f.at(key).is_boolean() && f.at(key).get<bool>()) slot = true;
  };
  claim("concave_on_pos", d.concave_on_pos);
  claim("concave", d.concave);
  claim("neg_star_shaped_on_pos", d.neg_star_shaped_on_pos);
  claim("neg_star_shaped", d.neg_star_shaped);
  claim("below_identity", d.below_identity);
  claim("strictly_negative_on_neg", d.strictly_negative_on_neg);
  claim("left_continuous_at_0", d.left_continuous_at_0);
  return UtilityFn(pieces, d, name);
}

inline LossFn loss_from_json(const json& j, const std::string& where) {
  if (j.is_string()) return loss_preset(j.get<std::string>());
  auto pieces = pieces_from_json(j, where);
  std::string name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "";
  LossFn detected(pieces, std::nullopt, name);
  if (!j.contains("flags")) return detected;
  LossFlags d = detected.flags();
  const auto& f = j.at("flags");
  auto claim = [&](const char* key, bool& slot) {
    if (f.contains(key) && f.at(key).is_boolean() && f.at(key).get<bool>()) slot = true;
  };
  claim("positive_on_pos", d.positive_on_pos);
  claim("pos_star_shaped_on_neg", d.pos_star_shaped_on_neg);
  claim("star_shaped", d.star_shaped);
  claim("convex", d.convex);
  return LossFn(pieces, d, name);
}

// ---- functional specs ------------------------------------------------------

inline json axiom_flags_json(const AxiomFlags& f) {
  return {{"monotone", f.monotone},
          {"normalized", f.normalized},
          {"cash_additive", f.cash_additive},
          {"pos_homogeneous", f.pos_homogeneous},
          {"star_shaped", f.star_shaped},
          {"convex_or_concave", f.convex_or_concave}};
}

inline json spec_json(const FunctionalSpec& spec) {
  json var = std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, variant::VaR>) return {{"type", "var"}, {"alpha", v.alpha}};
        else if constexpr (std::is_same_v<T, variant::ES>) return {{"type", "es"}, {"alpha", v.alpha}};
        else if constexpr (std::is_same_v<T, variant::LVaR>) {
          json b = json::array();
          for (const auto& k : v.profile.breakpoints()) b.push_back({{"loss", k.loss}, {"alpha", k.alpha}});
          return {{"type", "lvar"}, {"breakpoints", b}, {"alpha_inf", v.profile.alpha_inf()}};
        } else if constexpr (std::is_same_v<T, variant::AdjES>) {
          json pts = json::array();
          for (const auto& q : v.g.points()) pts.push_back({{"alpha", q.alpha}, {"g", q.g}});
          return {{"type", "adj_es"}, {"inf_prefix", v.g.inf_prefix()}, {"points", pts}};
        } else if constexpr (std::is_same_v<T, variant::Shortfall>) return {{"type", "shortfall"}, {"loss", loss_json(v.loss)}};
        else if constexpr (std::is_same_v<T, variant::Entropic>) return {{"type", "entropic"}, {"gamma", v.gamma}};
        else if constexpr (std::is_same_v<T, variant::WorstCase>) return {{"type", "worstcase"}};
        else if constexpr (std::is_same_v<T, variant::ExpectedUtility>)
          return {{"type", "expected_utility"}, {"utility", utility_json(v.u)}};
        else if constexpr (std::is_same_v<T, variant::ClassicalCE>) return {{"type", "classical_ce"}, {"utility", utility_json(v.u)}};
        else if constexpr (std::is_same_v<T, variant::UMeanCE>) return {{"type", "umean_ce"}, {"utility", utility_json(v.u)}};
        else if constexpr (std::is_same_v<T, variant::OCE>) return {{"type", "oce"}, {"utility", utility_json(v.u)}};
        else if constexpr (std::is_same_v<T, variant::Custom>) return {{"type", "custom"}, {"name", v.name}};
        else return {{"type", "negation"}, {"inner", spec_json(*v.inner)}};
      },
      spec.variant());
  return {{"kind", kind_name(spec.kind())}, {"variant", var}, {"flags", axiom_flags_json(spec.flags())}};
}

inline FunctionalSpec spec_from_json(const json& j, const std::string& where = "spec") {
  if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_object())
    throw ValidationError(where + ": needs a \"variant\" object");
  const json& v = j.at("variant");
  if (!v.contains("type") || !v.at("type").is_string()) throw ValidationError(where + ".variant: needs a \"type\"");
  const std::string t = v.at("type").get<std::string>();
  const std::string w = where + ".variant";
  auto build = [&]() -> FunctionalSpec {
    if (t == "var") return FunctionalSpec::var(read_finite(v, "alpha", w));
    if (t == "es") return FunctionalSpec::es(read_finite(v, "alpha", w));
    if (t == "entropic") return FunctionalSpec::entropic(read_finite(v, "gamma", w));
    if (t == "worstcase") return FunctionalSpec::worst_case();
    if (t == "lvar") {
      if (!v.contains("breakpoints") || !v.at("breakpoints").is_array()) throw ValidationError(w + ": needs breakpoints");
      std::vector<AlphaProfile::Breakpoint> b;
      for (std::size_t i = 0; i < v.at("breakpoints").size(); ++i) {
        std::string wi = w + ".breakpoints[" + std::to_string(i) + "]";
        b.push_back({read_finite(v.at("breakpoints")[i], "loss", wi), read_finite(v.at("breakpoints")[i], "alpha", wi)});
      }
      return FunctionalSpec::lvar(AlphaProfile(std::move(b), read_finite(v, "alpha_inf", w)));
    }
    if (t == "adj_es") {
      if (!v.contains("points") || !v.at("points").is_array()) throw ValidationError(w + ": needs points");
      std::vector<GProfile::Point> pts;
      for (std::size_t i = 0; i < v.at("points").size(); ++i) {
        std::string wi = w + ".points[" + std::to_string(i) + "]";
        pts.push_back({read_finite(v.at("points")[i], "alpha", wi), read_finite(v.at("points")[i], "g", wi)});
      }
      return FunctionalSpec::adj_es(GProfile(read_finite(v, "inf_prefix", w), std::move(pts)));
    }
    if (t == "shortfall") {
      if (!v.contains("loss")) throw ValidationError(w + ": needs loss");
      return FunctionalSpec::shortfall(loss_from_json(v.at("loss"), w + ".loss"));
    }
    if (t == "expected_utility" || t == "classical_ce" || t == "umean_ce" || t == "oce") {
      if (!v.contains("utility")) throw ValidationError(w + ": needs utility");
      UtilityFn u = utility_from_json(v.at("utility"), w + ".utility");
      if (t == "expected_utility") return FunctionalSpec::expected_utility(std::move(u));
      if (t == "classical_ce") return FunctionalSpec::classical_ce(std::move(u));
      if (t == "umean_ce") return FunctionalSpec::umean_ce(std::move(u));
      return FunctionalSpec::oce(std::move(u));
    }
    if (t == "negation") {
      if (!v.contains("inner")) throw ValidationError(w + ": needs inner");
      return FunctionalSpec::negation(spec_from_json(v.at("inner"), w + ".inner"));
    }
    if (t == "custom") throw ValidationError(w + ": custom functionals carry code and cannot be loaded from JSON");
    throw ValidationError(w + ": unknown variant type '" + t + "'");
  };
  FunctionalSpec spec = [&] {
    try {
      return build();
    } catch (const ParameterError& e) {
      throw ValidationError(w + ": " + e.what());
    }
  }();
  if (j.contains("kind") && j.at("kind") != kind_name(spec.kind()))
    throw ValidationError(where + ".kind: variant '" + t + "' is a " + kind_name(spec.kind()) + " functional");
  if (j.contains("flags")) {
    // claimed flags must be among the ones the variant establishes
    json have = axiom_flags_json(spec.flags());
    for (auto it = j.at("flags").begin(); it != j.at("flags").end(); ++it) {
      if (!have.contains(it.key())) throw ValidationError(where + ".flags: unknown flag '" + it.key() + "'");
      if (it.value().is_boolean() && it.value().get<bool>() && !have.at(it.key()).get<bool>())
        throw ValidationError(where + ".flags." + it.key() + ": claimed but not established for '" + t + "'");
    }
  }
  return spec;
}

/// var:a, es:a, entropic:g, worstcase, expectation, eu:/ce:/umean:/oce:<utility preset>, shortfall:<loss preset>.
inline FunctionalSpec spec_preset(const std::string& s) {
  auto colon = s.find(':');
  std::string head = s.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  const std::string where = "spec preset '" + s + "'";
  try {
    if (head == "var") return FunctionalSpec::var(parse_number(rest, where));
    if (head == "es") return FunctionalSpec::es(parse_number(rest, where));
    if (head == "entropic") return FunctionalSpec::entropic(parse_number(rest, where));
    if (head == "worstcase" && rest.empty()) return FunctionalSpec::worst_case();
    if (head == "expectation" && rest.empty()) return FunctionalSpec::expectation();
    if (head == "eu") return FunctionalSpec::expected_utility(utility_preset(rest));
    if (head == "ce") return FunctionalSpec::classical_ce(utility_preset(rest));
    if (head == "umean") return FunctionalSpec::umean_ce(utility_preset(rest));
    if (head == "oce") return FunctionalSpec::oce(utility_preset(rest));
    if (head == "shortfall") return FunctionalSpec::shortfall(loss_preset(rest));
  } catch (const ParameterError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError("unknown " + where);
}

/// A JSON file, inline JSON text, or a preset name.
inline FunctionalSpec load_spec(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return spec_from_json(parse_json_text(read_file(arg), arg), arg);
  if (!arg.empty() && arg.front() == '{') return spec_from_json(parse_json_text(arg, "spec"));
  return spec_preset(arg);
}

/// FNV-1a 64 of the canonical spec JSON, as 16 hex digits.
inline std::string spec_hash(const FunctionalSpec& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : spec_json(spec).dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- reports ---------------------------------------------------------------

inline json sequence_json(const std::vector<LambdaValue>& seq) {
  json out = json::array();
  for (const auto& lv : seq) out.push_back({{"lambda", lv.lambda}, {"value", extended_json(lv.value)}});
  return out;
}

inline json evidence_json(const Evidence& e) { return {{"identity", e.identity}, {"sequence", sequence_json(e.sequence)}}; }

inline json verdict_json(const SensitivityVerdict& v) {
  return {{"status", status_name(v.status)},
          {"method", method_name(v.method)},
          {"certified", v.certified},
          {"domain", v.domain},
          {"criterion", v.criterion},
          {"lambda_x", v.lambda_x ? json(*v.lambda_x) : json(nullptr)},
          {"witness", v.witness ? position_json(*v.witness) : json(nullptr)},
          {"evidence", v.evidence ? evidence_json(*v.evidence) : json(nullptr)},
          {"lambda_max", v.lambda_max},
          {"samples", v.positions_tried},
          {"seed", v.seed}};
}

inline json position_verdict_json(const PositionVerdict& v) {
  return {{"outcome", outcome_name(v.outcome)},
          {"lambda_x", v.lambda_x ? json(*v.lambda_x) : json(nullptr)},
          {"evidence", evidence_json(v.evidence)},
          {"reason", v.reason}};
}

inline json recession_json(const RecessionEstimate& r) {
  json trace = json::array();
  for (const auto& p : r.ratio_trace) trace.push_back({{"lambda", p.lambda}, {"ratio", extended_json(p.ratio)}});
  return {{"value", extended_json(r.value)},
          {"mode", mode_name(r.mode)},
          {"lambda_max", r.lambda_max},
          {"ratio_trace", trace}};
}

inline json battery_json(const BatteryReport& b) {
  json rows = json::array();
  for (const auto& v : b.rows) rows.push_back(verdict_json(v));
  return {{"rows", rows}, {"ordering_holds", b.ordering_holds}, {"ordering_violations", b.ordering_violations}};
}

inline json concentration_json(const ConcentrationResult& c) {
  return {{"outcome", concentration_name(c.outcome)},
          {"lambda", c.lambda ? json(*c.lambda) : json(nullptr)},
          {"sweep", sequence_json(c.sweep)},
          {"reason", c.reason}};
}

inline json fixture_report_json(const FixtureReport& r) {
  json as = json::array();
  for (const auto& a : r.assertions)
    as.push_back({{"name", a.name},
                  {"passed", a.passed},
                  {"relation", a.relation},
                  {"lhs", num(a.lhs)},
                  {"rhs", num(a.rhs)},
                  {"tolerance", a.tolerance}});
  json values = json::object();
  for (const auto& [k, v] : r.values) values[k] = num(v);
  const auto* first = r.first_failure();
  return {{"id", r.id},
          {"params", r.params},
          {"passed", r.passed()},
          {"assertions", as},
          {"values", values},
          {"first_failure", first ? json(first->name) : json(nullptr)}};
}

inline json axiom_report_json(const AxiomReport& r) {
  json first = json::object();
  for (const auto& [k, v] : r.first) {
    first[k] = {{"trial", v.trial},
                {"x", position_json(v.x)},
                {"y", v.y ? position_json(*v.y) : json(nullptr)},
                {"lambda", v.lambda},
                {"m", v.m},
                {"t", v.t},
                {"lhs", num(v.lhs)},
                {"rhs", num(v.rhs)},
                {"relation", v.relation}};
  }
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"passed", r.passed},
          {"all_passed", r.all_passed()},
          {"first_violation", first}};
}

inline json param_spec_json(const ParamSpec& p) {
  return {{"default", p.default_value},
          {"lo", p.lo},
          {"hi", p.hi},
          {"lo_inclusive", p.lo_inclusive},
          {"hi_inclusive", p.hi_inclusive},
          {"integer", p.integer},
          {"description", p.description}};
}

/// Contents of fixtures.json: id -> topic, description and parameter schema.
inline json fixture_index_json() {
  json out = json::object();
  for (const auto& f : fixture_registry()) {
    json params = json::object();
    for (const auto& p : f.params) params[p.name] = param_spec_json(p);
    out[f.id] = {{"topic", f.topic}, {"description", f.description}, {"params", params}};
  }
  return out;
}

/// Canonical text form: two-space indent, sorted keys, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace losssense::io
