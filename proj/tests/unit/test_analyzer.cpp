#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "mew/analyzer.hpp"
#include "mew/errors.hpp"
#include "testing.hpp"

using mew::Point;
using mew::VerdictTag;

namespace {

mew::MoebiusStructure flat_structure() {
  return mew::MoebiusStructure(mew::parse("0"), mew::parse("0"), mew::parse("0"), mew::parse("0"));
}

mew::AlphaExpressions real_alpha(const char* a1, const char* a2) {
  return {{mew::parse(a1), mew::parse(a2)}, {mew::parse("0"), mew::parse("0")}};
}

}  // namespace

TEST(AlphaFromF, RadialExamples) {
  auto inv = mew::compute_invariants(mew::testing::radial_example(), {1, 0});
  auto c = mew::alpha_from_F(inv, -2.0);
  EXPECT_EQ(c.source, mew::CandidateSource::Alpha1Formula);
  EXPECT_NEAR(c.alpha[0], 0.0, 1e-12);
  EXPECT_NEAR(c.alpha[1], -1.0, 1e-12);
  auto inv2 = mew::compute_invariants(mew::testing::radial_example(), {0, 1});
  auto c2 = mew::alpha_from_F(inv2, 2.0);
  EXPECT_NEAR(c2.alpha[0], -1.0, 1e-12);
  EXPECT_NEAR(c2.alpha[1], 0.0, 1e-12);
}

TEST(AlphaFromF, P0Vanishes) {
  auto inv = mew::compute_invariants(mew::testing::antiradial_example(), {1, 0});
  EXPECT_THROW(mew::alpha_from_F(inv, std::sqrt(8.0 / 3.0)), mew::P0Vanishes);
  EXPECT_NO_THROW(mew::alpha_from_F(inv, 1.0));
}

TEST(P0Branch, Examples) {
  auto anti = mew::f_from_P0_branch(mew::compute_invariants(mew::testing::antiradial_example(), {1, 0}));
  EXPECT_NEAR(anti.f, 0.0, 1e-12);
  EXPECT_FALSE(anti.consistent);
  auto radial = mew::f_from_P0_branch(mew::compute_invariants(mew::testing::radial_example(), {1, 0}));
  EXPECT_FALSE(radial.consistent);
  // rho = 2, sigma = 6 needs F^2 = 1; solving the F formula for ell with
  // mu = tau = 0 and F = 1 gives ell = -5/2 rho.
  mew::PointInvariants syn;
  syn.rho = 2;
  syn.sigma = 6;
  syn.ell = -5;
  auto b = mew::f_from_P0_branch(syn);
  EXPECT_NEAR(b.f, 1.0, 1e-15);
  EXPECT_TRUE(b.consistent);
  syn.ell = -4;
  EXPECT_FALSE(mew::f_from_P0_branch(syn).consistent);
}

TEST(VerifyClosedForm, RadialSolution) {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> c(-2, 2);
  const auto s = mew::testing::radial_example();
  for (int i = 0; i < 20; ++i) {
    const Point p{c(rng), c(rng)};
    for (int sign : {1, -1}) {
      const auto alpha = sign > 0 ? real_alpha("y", "-x") : real_alpha("-y", "x");
      auto r = mew::verify_closed_form(s, alpha, p, mew::Mode::Real);
      EXPECT_NEAR(r.f.real(), -2.0 * sign, 1e-12);
      EXPECT_LT(r.max_abs(), 1e-9) << p.x << "," << p.y;
      ASSERT_TRUE(r.constraint_u && r.constraint_w);
    }
  }
  auto bad = mew::verify_closed_form(s, real_alpha("x", "y"), {0.5, 0.3}, mew::Mode::Real);
  EXPECT_GT(bad.relative, 1e-3);
}

TEST(VerifyClosedForm, AntiradialComplexSolution) {
  std::mt19937 rng(52);
  std::uniform_real_distribution<double> c(-2, 2);
  const auto s = mew::testing::antiradial_example();
  for (int i = 0; i < 20; ++i) {
    const Point p{c(rng), c(rng)};
    for (int sign : {1, -1}) {
      mew::AlphaExpressions a{{mew::parse("0"), mew::parse("0")},
                              {mew::parse(sign > 0 ? "y" : "-y"), mew::parse(sign > 0 ? "-x" : "x")}};
      auto r = mew::verify_closed_form(s, a, p, mew::Mode::Complex);
      EXPECT_NEAR(std::abs(r.f - std::complex<double>(0, -2.0 * sign)), 0.0, 1e-12);
      EXPECT_LT(r.max_abs(), 1e-9);
    }
  }
  // No real alpha of the same shape solves it.
  EXPECT_GT(mew::verify_closed_form(s, real_alpha("y", "-x"), {1, 0.5}, mew::Mode::Real).relative, 1e-3);
}

TEST(VerifyClosedForm, FlatStructure) {
  auto zero = mew::verify_closed_form(flat_structure(), real_alpha("0", "0"), {0.3, 0.2}, mew::Mode::Real);
  EXPECT_EQ(zero.max_abs(), 0.0);
  EXPECT_FALSE(zero.constraint_u.has_value());
  auto one = mew::verify_closed_form(flat_structure(), real_alpha("1", "0"), {0.3, 0.2}, mew::Mode::Real);
  EXPECT_NEAR(one.differential, std::sqrt(0.5), 1e-14);
  EXPECT_EQ(one.trace, 0.0);
}

TEST(VerifyCandidate, TrackedRadialField) {
  const auto s = mew::testing::radial_example();
  for (Point p : {Point{1, 0}, Point{-0.7, 1.3}}) {
    auto inv = mew::compute_invariants(s, p);
    for (double f : {-2.0, 2.0}) {
      auto r = mew::verify_candidate(s, mew::alpha_from_F(inv, f), p);
      EXPECT_LT(r.relative, 1e-8);
      ASSERT_TRUE(r.gradient_f.has_value());
      EXPECT_LT(*r.gradient_f, 1e-7);
    }
  }
}

TEST(VerifyCandidate, TrackingFailsWithoutRootBranch) {
  // F = 1 is not a common root anywhere, so the continuation has nothing to follow.
  const auto s = mew::testing::radial_example();
  auto inv = mew::compute_invariants(s, {1, 0});
  EXPECT_THROW(mew::verify_candidate(s, mew::alpha_from_F(inv, 1.0), {1, 0}), mew::GridTrackingFailed);
}

TEST(Classify, Examples) {
  auto rot = mew::classify_point(mew::testing::rotational_example(), {1, 0});
  EXPECT_EQ(rot.tag, VerdictTag::Obstructed);
  ASSERT_TRUE(rot.resultants.has_value());
  const double want13 = std::pow(2.0, 142) * std::pow(3.0, 10) * 2908441.0;
  EXPECT_LT(std::abs(std::abs((*rot.resultants)[1]) - want13), 1e-4 * want13);

  auto radial = mew::classify_point(mew::testing::radial_example(), {1, 0});
  EXPECT_EQ(radial.tag, VerdictTag::AdmitsRealCandidate);
  auto f = radial.verified_f();
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NEAR(f[0], -2, 1e-9);
  EXPECT_NEAR(f[1], 2, 1e-9);
  EXPECT_TRUE(radial.complex_candidates.empty());

  auto anti = mew::classify_point(mew::testing::antiradial_example(), {1, 0});
  EXPECT_EQ(anti.tag, VerdictTag::VanishingObstructionsNoRealSolution);
  ASSERT_TRUE(anti.m_norm.has_value());
  EXPECT_GT(*anti.m_norm, 1e-3);
  ASSERT_EQ(anti.complex_candidates.size(), 2u);
  EXPECT_NEAR(std::abs(anti.complex_candidates[0] - std::complex<double>(0, -2)), 0, 1e-8);
  EXPECT_NEAR(std::abs(anti.complex_candidates[1] - std::complex<double>(0, 2)), 0, 1e-8);

  EXPECT_EQ(mew::classify_point(flat_structure(), {0.4, 0.1}).tag, VerdictTag::Flat);
  EXPECT_EQ(mew::classify_point(mew::testing::rotational_example(), {0, 0}).tag, VerdictTag::Flat);
}

TEST(Classify, AdmittedRootsSatisfyConstraints) {
  const mew::Settings st;
  for (Point p : {Point{0.3, -1.1}, Point{1.5, 0.4}}) {
    auto v = mew::classify_point(mew::testing::radial_example(), p);
    ASSERT_EQ(v.tag, VerdictTag::AdmitsRealCandidate);
    auto c = mew::assemble(mew::compute_invariants(mew::testing::radial_example(), p));
    for (double f : v.verified_f()) {
      EXPECT_LT(mew::backward_error(c.p1, f), st.tol_root);
      EXPECT_LT(mew::backward_error(c.p2, f), st.tol_root);
      EXPECT_LT(mew::backward_error(c.p3, f), st.tol_root);
      EXPECT_GT(mew::backward_error(c.p0, f), st.tol_root);
    }
  }
}

TEST(ClassifyProperty, OrientationFlipNegatesF) {
  for (Point p : {Point{1, 0}, Point{-0.4, 0.9}}) {
    for (const auto& s : {mew::testing::rotational_example(), mew::testing::radial_example(),
                          mew::testing::antiradial_example()}) {
      auto a = mew::classify_point(s, p);
      auto b = mew::classify_point(s.with_orientation(-s.orientation()), p);
      EXPECT_EQ(a.tag, b.tag);
      auto fa = a.verified_f(), fb = b.verified_f();
      ASSERT_EQ(fa.size(), fb.size());
      for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_NEAR(fa[i], -fb[fb.size() - 1 - i], 1e-9);
    }
  }
}

TEST(ClassifyProperty, Deterministic) {
  auto a = mew::classify_point(mew::testing::radial_example(), {0.6, 0.7});
  auto b = mew::classify_point(mew::testing::radial_example(), {0.6, 0.7});
  EXPECT_EQ(a.tag, b.tag);
  EXPECT_EQ(a.resultants, b.resultants);
  EXPECT_EQ(a.indicators, b.indicators);
  EXPECT_EQ(a.verified_f(), b.verified_f());
}

TEST(ClassifyProperty, RescalingPreservesTags) {
  const std::vector<const char*> omegas{"0.3*x", "0.2*sin(x*y)", "0.1*(x*x + y*y)"};
  mew::GridSpec g{-1.5, 1.5, -1.5, 1.5, 5, 5};
  for (const auto& s : {mew::testing::rotational_example(), mew::testing::radial_example(),
                        mew::testing::antiradial_example()}) {
    auto base = mew::scan_region(s, g);
    for (const char* w : omegas) {
      auto r = mew::scan_region(mew::conformal_rescale(s, mew::parse(w)), g);
      for (std::size_t i = 0; i < base.nodes.size(); ++i) EXPECT_EQ(base.nodes[i].tag, r.nodes[i].tag) << w << " " << i;
    }
  }
}

TEST(Scan, Summaries) {
  mew::GridSpec g{-2, 2, -2, 2, 21, 21};
  auto rot = mew::scan_region(mew::testing::rotational_example(), g);
  EXPECT_EQ(rot.summary, "OBSTRUCTED");
  EXPECT_EQ(rot.histogram[VerdictTag::Flat], 1);
  EXPECT_EQ(rot.histogram[VerdictTag::Obstructed], 440);
  EXPECT_EQ(rot.detail, "Obstructed on 100.0% of non-flat nodes");

  mew::GridSpec small{-2, 2, -2, 2, 5, 5};
  auto radial = mew::scan_region(mew::testing::radial_example(), small);
  EXPECT_EQ(radial.summary, "ADMITS (F = ±2)");
  EXPECT_EQ(radial.histogram[VerdictTag::AdmitsRealCandidate], 24);

  EXPECT_EQ(mew::scan_region(flat_structure(), small).summary, "FLAT");
  EXPECT_EQ(mew::scan_region(mew::testing::antiradial_example(), small).summary, "NO REAL SOLUTION");
  EXPECT_THROW(mew::scan_region(flat_structure(), {0, 1, 0, 1, 1, 3}), mew::ConfigError);
}

TEST(Scan, ThreadCountDoesNotChangeResults) {
  mew::GridSpec g{-1, 1, -1, 1, 4, 4};
  mew::Settings one;
  one.threads = 1;
  mew::Settings many;
  many.threads = 4;
  auto a = mew::scan_region(mew::testing::radial_example(), g, one);
  auto b = mew::scan_region(mew::testing::radial_example(), g, many);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    EXPECT_EQ(a.nodes[i].tag, b.nodes[i].tag);
    EXPECT_EQ(a.nodes[i].verified_f(), b.nodes[i].verified_f());
  }
}
