#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mew/errors.hpp"
#include "mew/invariants.hpp"
#include "testing.hpp"

using mew::MoebiusStructure;
using mew::parse;
using mew::Point;
using mew::PointInvariants;

namespace {

using Td = mew::Tensor<double>;

// Sum of the rotational and radial examples: traceless, u = 0, with every invariant generic.
MoebiusStructure mixed_example(int orientation = +1) {
  return MoebiusStructure(parse("0"), parse("x*y + (x*x - y*y)/2"), parse("(y*y - x*x)/2 + x*y"),
                          parse("-x*y + (y*y - x*x)/2"), orientation);
}

std::vector<Point> ring_points(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> r(0.5, 2.0), th(0, 2 * M_PI);
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    const double a = r(rng), b = th(rng);
    out.push_back({a * std::cos(b), a * std::sin(b)});
  }
  return out;
}

double rel(double got, double want, double scale) { return std::abs(got - want) / scale; }

}  // namespace

TEST(CottonYork, FlatStructure) {
  MoebiusStructure zero(parse("0"), parse("0"), parse("0"), parse("0"));
  auto cy = mew::cotton_york(zero, {0.2, 0.3});
  EXPECT_TRUE(cy.flat);
  EXPECT_EQ(cy.y.at(0).value(), 0.0);
  EXPECT_EQ(cy.y.at(1).value(), 0.0);
  EXPECT_THROW(mew::compute_invariants(zero, {0.2, 0.3}), mew::FlatPoint);
}

TEST(CottonYork, RadialExample) {
  // hand expansion: d_a P_bc - d_b P_ac dualized gives Y = (4y, -4x)
  for (Point p : {Point{1, 0}, Point{0.3, -0.7}, Point{-2, 1.5}}) {
    auto cy = mew::cotton_york(mew::testing::radial_example(), p);
    EXPECT_FALSE(cy.flat);
    EXPECT_NEAR(cy.y.at(0).value(), 4 * p.y, 1e-12);
    EXPECT_NEAR(cy.y.at(1).value(), -4 * p.x, 1e-12);
    auto inv = mew::compute_invariants(mew::testing::radial_example(), p);
    EXPECT_NEAR(inv.rho, 16 * (p.x * p.x + p.y * p.y), 1e-11);
  }
}

TEST(CottonYork, MatchesFiniteDifferences) {
  // u = 0: Y_c = eps^{ab}(d_a P_bc - d_b P_ac) = 2 (d_1 P_2c - d_2 P_1c)
  auto s = mixed_example();
  auto p11 = parse("x*y + (x*x - y*y)/2"), p12 = parse("(y*y - x*x)/2 + x*y"), p22 = parse("-x*y + (y*y - x*x)/2");
  const Point p{0.6, -1.3};
  auto fd = [&](const mew::Expr& e, int axis) {
    mew::testing::FiniteDiff d{[&](double x, double y) { return e.evaluate({x, y}); }, 1e-5};
    return axis == 0 ? d.dx(p.x, p.y) : d.dy(p.x, p.y);
  };
  const double y1 = 2 * (fd(p12, 0) - fd(p11, 1));
  const double y2 = 2 * (fd(p22, 0) - fd(p12, 1));
  auto cy = mew::cotton_york(s, p);
  EXPECT_NEAR(cy.y.at(0).value(), y1, 1e-8);
  EXPECT_NEAR(cy.y.at(1).value(), y2, 1e-8);
}

TEST(CottonYork, BianchiConsistency) {
  // 1/2 eps_ab Y^b = grad_a K - grad^b P_ab, checked on rescaled structures with curvature
  std::mt19937 rng(21);
  for (const char* omega : {"0.3*sin(x) + 0.2*y", "0.1*x*x - 0.2*cos(x*y)"}) {
    auto s = mew::conformal_rescale(mixed_example(), parse(omega));
    for (Point p : ring_points(rng, 5)) {
      auto local = mew::localize(s, p, 6);
      const auto& g = local.geometry;
      auto cy = mew::cotton_york(local);
      auto dk = g.covariant_derivative(Td::scalar(g.gauss_curvature()));
      auto dp = g.covariant_derivative(local.rho);  // (c, a, b) = grad_c P_ab
      auto yup = g.raise(cy.y);
      for (int a = 0; a < 2; ++a) {
        double lhs = 0.0;
        for (int b = 0; b < 2; ++b) lhs += 0.5 * g.eps_lower(a, b).value() * yup.at(b).value();
        double div = 0.0;
        for (int b = 0; b < 2; ++b) div += g.inverse_factor().value() * dp.at(b, a, b).value();
        const double rhs = dk.at(a).value() - div;
        EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs))) << omega;
      }
    }
  }
}

TEST(Invariants, RotationalExampleValues) {
  // values at (1, 0) from an independent symbolic expansion
  auto inv = mew::compute_invariants(mew::testing::rotational_example(), {1, 0});
  EXPECT_NEAR(inv.y[0], -4.0, 1e-12);
  EXPECT_NEAR(inv.y[1], 0.0, 1e-12);
  EXPECT_NEAR(inv.rho, 16.0, 1e-12);
  EXPECT_NEAR(inv.mu, -4.0, 1e-12);
  EXPECT_NEAR(inv.phi, 0.0, 1e-12);
  EXPECT_NEAR(inv.sigma, 0.0, 1e-10);
  EXPECT_NEAR(inv.tau, 128.0, 1e-10);
  EXPECT_NEAR(inv.ell, 8.0, 1e-10);
}

TEST(Invariants, AntiradialExample) {
  std::mt19937 rng(22);
  for (Point p : ring_points(rng, 10)) {
    auto inv = mew::compute_invariants(mew::testing::antiradial_example(), p);
    EXPECT_LT(rel(inv.sigma, 8 * inv.rho, 8 * inv.rho), 1e-10);
    EXPECT_LT(std::abs(inv.mu) / std::sqrt(inv.rho), 1e-10);
    EXPECT_LT(std::abs(inv.tau) / inv.sigma, 1e-10);
    EXPECT_LT(std::abs(inv.ell) / inv.rho, 1e-10);
    EXPECT_NEAR(inv.phi, 4.0, 1e-10);
  }
}

TEST(Invariants, RadialExample) {
  std::mt19937 rng(23);
  for (Point p : ring_points(rng, 10)) {
    auto inv = mew::compute_invariants(mew::testing::radial_example(), p);
    EXPECT_LT(rel(inv.sigma, -8 * inv.rho, 8 * inv.rho), 1e-10);
    EXPECT_NEAR(inv.phi, -4.0, 1e-10);
  }
}

TEST(Invariants, Orthogonality) {
  std::mt19937 rng(24);
  for (const char* omega : {"0", "0.3*sin(x*y) - 0.1*x"}) {
    auto s = mew::conformal_rescale(mixed_example(), parse(omega));
    for (Point p : ring_points(rng, 10)) {
      auto inv = mew::compute_invariants(s, p);
      EXPECT_GE(inv.rho, 0.0);
      EXPECT_LT(std::abs(inv.dot(inv.u, inv.y)), 1e-12 * inv.rho);
      EXPECT_NEAR(inv.dot(inv.u, inv.u), inv.rho, 1e-12 * inv.rho);
    }
  }
}

TEST(Invariants, SigmaTwoWays) {
  // sigma = Y^a W_a expands to Y^a Y^b grad_b U_a + phi rho since U.Y = 0
  std::mt19937 rng(25);
  auto s = mew::conformal_rescale(mixed_example(), parse("0.2*cos(x) + 0.1*x*y"));
  for (Point p : ring_points(rng, 10)) {
    auto inv = mew::compute_invariants(s, p);
    const double expanded = inv.yy_grad_u + inv.phi * inv.rho;
    EXPECT_LT(rel(inv.sigma, expanded, std::abs(inv.sigma) + std::abs(inv.phi * inv.rho)), 1e-9);
  }
}

TEST(Invariants, TauVanishesWhenWParallelToY) {
  // in the antiradial example W_a is parallel to Y_a
  auto inv = mew::compute_invariants(mew::testing::antiradial_example(), {0.4, 0.9});
  const double cross = inv.w[0] * inv.y[1] - inv.w[1] * inv.y[0];
  EXPECT_LT(std::abs(cross), 1e-10 * std::hypot(inv.w[0], inv.w[1]) * std::sqrt(inv.rho));
  EXPECT_LT(std::abs(inv.tau), 1e-10 * std::abs(inv.sigma));
}

TEST(InvariantsProperty, ConformalWeights) {
  std::mt19937 rng(26);
  std::uniform_real_distribution<double> c(-0.4, 0.4);
  for (int trial = 0; trial < 5; ++trial) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.3f*sin(x) + %.3f*cos(y) + %.3f*x*y", c(rng), c(rng), c(rng));
    const auto omega = parse(buf);
    auto s = mixed_example();
    auto r = mew::conformal_rescale(s, omega);
    for (Point p : ring_points(rng, 10)) {
      const PointInvariants a = mew::compute_invariants(s, p), b = mew::compute_invariants(r, p);
      const double w = omega.evaluate(p);
      auto check_vec = [&](const mew::Vec2& va, const mew::Vec2& vb, int weight, const char* name) {
        const double f = std::exp(weight * w), n = std::hypot(va[0], va[1]) * f;
        for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(vb[i] - f * va[i]), 1e-6 * n) << name << " " << buf;
      };
      auto check = [&](double sa, double sb, int weight, double scale, const char* name) {
        const double f = std::exp(weight * w);
        EXPECT_LT(std::abs(sb - f * sa), 1e-6 * scale * f) << name << " " << buf;
      };
      check_vec(a.y, b.y, -2, "Y");
      check_vec(a.u, b.u, -2, "U");
      check_vec(a.w, b.w, -6, "W");
      // L_a picks up sigma Ups_a on top of its weight: L' = e^{-10 w}(L + sigma d omega)
      const auto dw = omega.eval_jet(p, 1);
      const mew::Vec2 shifted{a.l[0] + a.sigma * dw.derivative(1, 0), a.l[1] + a.sigma * dw.derivative(0, 1)};
      check_vec(shifted, b.l, -10, "L");
      check(a.rho, b.rho, -6, a.rho, "rho");
      const double sw = std::sqrt(a.rho) * std::hypot(a.w[0], a.w[1]);
      check(a.sigma, b.sigma, -10, sw, "sigma");
      check(a.tau, b.tau, -10, sw, "tau");
    }
  }
}

TEST(InvariantsProperty, LHasPureWeightOnlyWhereSigmaVanishes) {
  std::mt19937 rng(27);
  const auto omega = parse("0.3*sin(x) - 0.2*x*y");
  // rotational example: sigma = 0, so L_a scales with weight -10
  auto s = mew::testing::rotational_example();
  auto r = mew::conformal_rescale(s, omega);
  for (Point p : ring_points(rng, 10)) {
    const PointInvariants a = mew::compute_invariants(s, p), b = mew::compute_invariants(r, p);
    const double f = std::exp(-10 * omega.evaluate(p)), n = std::hypot(a.l[0], a.l[1]) * f;
    for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(b.l[i] - f * a.l[i]), 1e-6 * n);
  }
  // mixed example: sigma != 0 and the pure weight law misses by sigma d omega
  auto m = mixed_example();
  auto mr = mew::conformal_rescale(m, omega);
  const Point p{0.7, -0.6};
  const PointInvariants a = mew::compute_invariants(m, p), b = mew::compute_invariants(mr, p);
  const double f = std::exp(-10 * omega.evaluate(p));
  const double miss = std::hypot(b.l[0] - f * a.l[0], b.l[1] - f * a.l[1]);
  EXPECT_GT(miss, 1e-2 * f * std::hypot(a.l[0], a.l[1]));
}

TEST(MBranch, AntiradialIsDefinedAndNonzero) {
  auto m = mew::compute_m(mew::testing::antiradial_example(), {1, 0});
  EXPECT_GT(m.norm, 1e-3 * m.scale);
  for (double v : m.m) EXPECT_TRUE(std::isfinite(v));
}

TEST(MBranch, NonPositiveSigmaRefuses) {
  EXPECT_THROW(mew::compute_m(mew::testing::rotational_example(), {1, 0}), mew::SigmaZero);
  EXPECT_THROW(mew::compute_m(mew::testing::radial_example(), {1, 0}), mew::SigmaZero);
}

TEST(MBranch, AlphaFormula) {
  auto s = mew::conformal_rescale(mew::testing::antiradial_example(), parse("0.1*x + 0.2*sin(y)"));
  const Point p{0.8, 0.5};
  auto inv = mew::compute_invariants(s, p);
  auto m = mew::compute_m(s, p);
  ASSERT_TRUE(inv.k.has_value());
  EXPECT_NEAR(m.k, *inv.k, 1e-9 * std::max(1.0, std::abs(m.k)));
  for (int a = 0; a < 2; ++a)
    EXPECT_NEAR(m.alpha[a], (*inv.k * inv.y[a] - inv.m * inv.u[a]) / inv.rho, 1e-9 * (1 + std::abs(m.alpha[a])));
}
