#include <gtest/gtest.h>

#include <cmath>

#include "losssense/scalar_fn.hpp"

using namespace losssense;

TEST(PiecewiseFn, EvaluatesForms) {
  PiecewiseFn f({Piece{-kInf, 0.0, form::Linear{2.0, 0.0}}, Piece{0.0, 1.0, form::Power{1.0, 0.5}},
                 Piece{1.0, kInf, form::Exponential{1.0, 1.0, 1.0}}});
  EXPECT_EQ(f(-3.0), -6.0);
  EXPECT_DOUBLE_EQ(f(0.25), 0.5);
  EXPECT_DOUBLE_EQ(f(2.0), 1.0 + (1.0 - std::exp(-2.0)));
  EXPECT_EQ(f.junctions().size(), 2u);
}

TEST(PiecewiseFn, RejectsGapsAndBadExponents) {
  EXPECT_THROW(PiecewiseFn({Piece{-kInf, 0.0, form::Linear{}}, Piece{1.0, kInf, form::Linear{}}}), ValidationError);
  EXPECT_THROW(PiecewiseFn({Piece{0.0, kInf, form::Linear{}}}), ValidationError);
  EXPECT_THROW(PiecewiseFn({Piece{-kInf, kInf, form::Power{1.0, 0.0}}}), ValidationError);
  EXPECT_THROW(PiecewiseFn(std::vector<Piece>{}), ValidationError);
}

TEST(PiecewiseFn, GeneralizedInverse) {
  UtilityFn u = power_s_utility(0.5, 0.5);
  EXPECT_NEAR(u.inverse(2.0), 4.0, 1e-12);
  EXPECT_NEAR(u.inverse(-3.0), -9.0, 1e-12);
  UtilityFn e = exponential_utility(1.0);
  EXPECT_NEAR(e.inverse(e(0.7)), 0.7, 1e-12);
  // flat piece: inf over the superlevel set
  UtilityFn flat({Piece{-kInf, 0.0, form::Linear{1.0, 0.0}}, Piece{0.0, 1.0, form::Constant{0.0}},
                  Piece{1.0, kInf, form::Linear{1.0, -1.0}}});
  EXPECT_EQ(flat.inverse(0.0), 0.0);
}

TEST(UtilityFn, Validation) {
  EXPECT_THROW(UtilityFn({Piece{-kInf, kInf, form::Linear{1.0, 1.0}}}), ValidationError);   // u(0) != 0
  EXPECT_THROW(UtilityFn({Piece{-kInf, kInf, form::Linear{-1.0, 0.0}}}), ValidationError);  // decreasing
  EXPECT_THROW(UtilityFn({Piece{-kInf, kInf, form::Power{1.0, 2.0}}}), ValidationError);    // superlinear
  UtilityFlags claim;
  claim.concave = true;
  EXPECT_THROW(UtilityFn({Piece{-kInf, 0.0, form::Power{1.0, 0.5}}, Piece{0.0, kInf, form::Power{1.0, 0.5}}}, claim),
               ValidationError);
}

TEST(UtilityFn, DetectedFlags) {
  auto e = exponential_utility(2.0).flags();
  EXPECT_TRUE(e.concave);
  EXPECT_TRUE(e.below_identity);
  EXPECT_TRUE(e.neg_star_shaped);
  EXPECT_TRUE(e.strictly_negative_on_neg);
  auto s = power_s_utility(0.5, 0.5).flags();
  EXPECT_FALSE(s.concave);
  EXPECT_TRUE(s.concave_on_pos);
  EXPECT_TRUE(s.neg_star_shaped_on_pos);
  EXPECT_TRUE(s.left_continuous_at_0);
  auto r = oce_remark_utility().flags();
  EXPECT_TRUE(r.concave);
  EXPECT_TRUE(r.below_identity);
}

TEST(UtilityFn, TailRatios) {
  EXPECT_EQ(power_s_utility(0.3, 0.5).loss_gain_ratio(), -kInf);
  EXPECT_EQ(power_s_utility(0.5, 0.5).loss_gain_ratio(), -1.0);
  EXPECT_EQ(power_s_utility(0.5, 0.3).loss_gain_ratio(), 0.0);
  EXPECT_EQ(exponential_utility(1.0).loss_gain_ratio(), -kInf);
  EXPECT_EQ(linear_utility().loss_gain_ratio(), -1.0);
  EXPECT_EQ(oce_remark_utility(0.5, 2.0).loss_gain_ratio(), -kInf);
}

TEST(UtilityFn, Slopes) {
  EXPECT_EQ(oce_remark_utility(0.5, 3.0).slope_at_minus_infinity(), 3.0);
  EXPECT_EQ(oce_remark_utility(0.5, 3.0).slope_at_plus_infinity(), 0.0);
  EXPECT_EQ(exponential_utility(1.0).slope_at_minus_infinity(), kInf);
  EXPECT_EQ(exponential_utility(1.0).slope_at_plus_infinity(), 0.0);
  EXPECT_EQ(linear_utility().slope_at_plus_infinity(), 1.0);
}

TEST(LossFn, FlagsAndRatio) {
  auto l = exponential_loss(1.5);
  EXPECT_TRUE(l.flags().positive_on_pos);
  EXPECT_TRUE(l.flags().convex);
  EXPECT_EQ(l.gain_loss_ratio(), -kInf);
  EXPECT_EQ(linear_loss().gain_loss_ratio(), -1.0);
  EXPECT_NEAR(l(1.0), std::exp(1.5) - 1.0, 1e-12);
}
