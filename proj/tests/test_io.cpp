#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "losssense/io.hpp"

using namespace losssense;
using io::json;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::vector<FunctionalSpec> one_per_variant() {
  return {FunctionalSpec::var(0.05),
          FunctionalSpec::es(0.1),
          FunctionalSpec::lvar(AlphaProfile({{-5.0, 0.01}, {-2.0, 0.05}, {0.0, 0.2}}, 0.01)),
          FunctionalSpec::adj_es(GProfile(0.1, {{0.1, 1.0}, {1.0, 0.0}})),
          FunctionalSpec::shortfall(exponential_loss(0.5)),
          FunctionalSpec::entropic(2.0),
          FunctionalSpec::worst_case(),
          FunctionalSpec::expected_utility(power_s_utility(0.3, 0.5)),
          FunctionalSpec::classical_ce(exponential_utility(1.0)),
          FunctionalSpec::umean_ce(oce_remark_utility()),
          FunctionalSpec::oce(oce_remark_utility(0.5, 2.0)),
          FunctionalSpec::negation(FunctionalSpec::es(0.2))};
}

}  // namespace

TEST(PositionIO, JsonRoundTrip) {
  Position x(make_space({0.2, 0.3, 0.5}), {-3.0, 0.5, 2.0});
  Position y = io::position_from_json(io::position_json(x));
  EXPECT_EQ(y.outcomes(), x.outcomes());
  EXPECT_EQ(y.prob(2), 0.5);
}

TEST(PositionIO, Csv) {
  Position x = io::position_from_csv("p,x\n0.25,-2\n0.25,-0.5\n0.5,1.5\n");
  EXPECT_EQ(x.size(), 3u);
  EXPECT_EQ(x.outcome(0), -2.0);
  std::string msg = error_of([] { io::position_from_csv("p,x\n0.5,1\n0.5,abc\n"); });
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("abc"), std::string::npos) << msg;
  EXPECT_NE(error_of([] { io::position_from_csv("p,x\n0.5,1\n0.4,2\n"); }).find("sum to"), std::string::npos);
}

TEST(PositionIO, InlineForms) {
  Position a = io::position_from_inline("-1_A(p=0.05)");
  EXPECT_EQ(a.prob(0), 0.05);
  EXPECT_EQ(a.outcome(0), -1.0);
  EXPECT_EQ(a.outcome(1), 0.0);
  Position b = io::position_from_inline("X=2*1_A-0.5*1_Ac(p=0.3)");
  EXPECT_EQ(b.outcome(0), 2.0);
  EXPECT_EQ(b.outcome(1), -0.5);
  Position c = io::position_from_inline("\xE2\x88\x92\xF0\x9D\x9F\x99_A+1_{A^c}(p=0.2)");
  EXPECT_EQ(c.outcome(0), -1.0);
  EXPECT_EQ(c.outcome(1), 1.0);
  Position d = io::position_from_inline("1e+1*1_A-1(p=0.5)");
  EXPECT_EQ(d.outcome(0), 9.0);
  EXPECT_EQ(d.outcome(1), -1.0);
  EXPECT_THROW(io::position_from_inline("-1_A"), ValidationError);
  EXPECT_THROW(io::position_from_inline("-1_B(p=0.1)"), ValidationError);
  EXPECT_THROW(io::position_from_inline("-1_A(p=1.5)"), ValidationError);
}

TEST(PositionIO, JsonErrorsNameTheAtom) {
  std::string msg = error_of([] { io::position_from_json(json::parse(R"({"atoms":[{"p":0.5,"x":1},{"p":0.5}]})")); });
  EXPECT_NE(msg.find("atom 1"), std::string::npos) << msg;
  msg = error_of([] { io::parse_json_text("{\"atoms\": [", "in.json"); });
  EXPECT_NE(msg.find("in.json"), std::string::npos) << msg;
  EXPECT_THROW(io::load_position("neither"), ValidationError);
}

TEST(SpecIO, RoundTripPerVariant) {
  Rng rng(42);
  for (const auto& spec : one_per_variant()) {
    json j = io::spec_json(spec);
    FunctionalSpec back = io::spec_from_json(j);
    EXPECT_EQ(io::spec_json(back), j) << j.dump();
    EXPECT_EQ(io::spec_hash(back), io::spec_hash(spec));
    for (int t = 0; t < 20; ++t) {
      Position x = random_position(rng);
      Extended a = evaluate(spec, x), b = evaluate(back, x);
      if (a.is_finite()) EXPECT_NEAR(a.value(), b.value(), 1e-12) << j.dump();
      else EXPECT_EQ(a.is_plus_infinity(), b.is_plus_infinity());
    }
  }
}

TEST(SpecIO, Presets) {
  EXPECT_EQ(io::spec_json(io::spec_preset("var:0.05")), io::spec_json(FunctionalSpec::var(0.05)));
  EXPECT_EQ(io::spec_json(io::spec_preset("eu:sqrt-s")),
            io::spec_json(FunctionalSpec::expected_utility(power_s_utility(0.5, 0.5))));
  EXPECT_EQ(io::spec_json(io::spec_preset("shortfall:exp:2")),
            io::spec_json(FunctionalSpec::shortfall(exponential_loss(2.0))));
  EXPECT_NO_THROW(io::spec_preset("oce:oce-remark:0.5,2"));
  EXPECT_NO_THROW(io::spec_preset("worstcase"));
  EXPECT_THROW(io::spec_preset("var:2"), ValidationError);
  EXPECT_THROW(io::spec_preset("var:abc"), ValidationError);
  EXPECT_THROW(io::spec_preset("eu:power-s:0.5"), ValidationError);
  EXPECT_THROW(io::spec_preset("median"), ValidationError);
}

TEST(SpecIO, HashIsStableAndDiscriminating) {
  std::string h = io::spec_hash(FunctionalSpec::es(0.1));
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h, io::spec_hash(FunctionalSpec::es(0.1)));
  EXPECT_NE(h, io::spec_hash(FunctionalSpec::es(0.11)));
  EXPECT_NE(h, io::spec_hash(FunctionalSpec::var(0.1)));
}

TEST(SpecIO, RejectsUnestablishedFlagClaims) {
  json j = io::spec_json(FunctionalSpec::var(0.1));
  j["flags"]["convex_or_concave"] = true;
  EXPECT_THROW(io::spec_from_json(j), ValidationError);
  json k = io::spec_json(FunctionalSpec::var(0.1));
  k["flags"] = {{"subadditive", false}};
  EXPECT_THROW(io::spec_from_json(k), ValidationError);
  json m = io::spec_json(FunctionalSpec::var(0.1));
  m["kind"] = "utility";
  EXPECT_THROW(io::spec_from_json(m), ValidationError);
  EXPECT_THROW(io::spec_from_json(json::parse(R"({"variant":{"type":"custom","name":"x"}})")), ValidationError);
}

TEST(SpecIO, UtilityJsonAndFlagClaims) {
  json u = json::parse(R"({"name":"kinked","pieces":[
      {"from":"-inf","to":0,"form":{"type":"linear","slope":2,"intercept":0}},
      {"from":0,"to":"inf","form":{"type":"linear","slope":1,"intercept":0}}]})");
  UtilityFn f = io::utility_from_json(u, "u");
  EXPECT_EQ(f(-1.0), -2.0);
  EXPECT_TRUE(f.flags().concave);
  json bad = u;
  bad["pieces"][0]["form"]["slope"] = 0.5;  // convex kink
  bad["flags"] = {{"concave", true}};
  EXPECT_THROW(io::utility_from_json(bad, "u"), ValidationError);
}

TEST(NumberFormatting, InfinitiesAndNegativeZero) {
  EXPECT_EQ(io::num(kInf), "inf");
  EXPECT_EQ(io::num(-kInf), "-inf");
  EXPECT_EQ(io::num(-0.0).dump(), "0.0");
  EXPECT_EQ(io::extended_json(Extended::minus_infinity()), "-inf");
}
