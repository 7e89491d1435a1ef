#include "mew/constraints.hpp"

#include <cmath>

#include "mew/errors.hpp"

namespace mew {

namespace {

// Abbreviations shared by the three displays.
struct Terms {
  double rho, mu, phi, sigma, tau, ell;
  double uds, yds;       // U^a grad_a sigma, Y^a grad_a sigma
  double uu_ddrho, yy_ddrho;
  double uu_dy, yy_du;   // U^a U^b grad_b Y_a, Y^a Y^b grad_b U_a
  double uu_dl, yy_dl, eps_dl;
  double p_uu, p_yy;
  double a, b, c;        // rho ell + tau phi, 5/2 rho^2, tau + 3 mu rho

  explicit Terms(const PointInvariants& i)
      : rho(i.rho), mu(i.mu), phi(i.phi), sigma(i.sigma), tau(i.tau), ell(i.ell),
        uds(i.u_grad_sigma), yds(i.y_grad_sigma),
        uu_ddrho(i.uu_hess_rho), yy_ddrho(i.yy_hess_rho),
        uu_dy(i.uu_grad_y), yy_du(i.yy_grad_u),
        uu_dl(i.uu_grad_l), yy_dl(i.yy_grad_l), eps_dl(i.eps_grad_l),
        p_uu(i.p_uu), p_yy(i.p_yy),
        a(i.rho * i.ell + i.tau * i.phi), b(2.5 * i.rho * i.rho), c(i.tau + 3 * i.mu * i.rho) {}
};

// Q(t), the part of P2~ outside the rational term.
Poly q_part(const Terms& v) {
  const double r = v.rho, s = v.sigma, phi = v.phi;
  const double r2 = r * r, r4 = r2 * r2;
  Poly::Coeffs q = Poly::Coeffs::Zero(9);
  q[8] = -4.5 * r2;
  q[6] = -(9 * v.yy_du * r + 3 * r * (3 * phi * r - s));
  q[4] = 3 * v.yy_du * s - 1.5 * r * v.yy_ddrho + 1.5 * v.c * v.c + 9 * r2 * v.p_yy + 3 * phi * s * r -
         0.5 * (3 * phi * r - s) * (3 * phi * r - s);
  q[3] = -25 * r2 * v.c;
  q[2] = 0.5 * v.yy_ddrho * s - 185.0 / 8.0 * r4 - 3 * v.yy_dl * r - 6 * r * s * v.p_yy +
         phi * s * (3 * phi * r - s) + v.c * v.a - v.c * v.yds;
  q[1] = 5.5 * r * s * v.c - 13.5 * r2 * v.a - 2.5 * r2 * v.yds;
  q[0] = v.yy_dl * s - 2.5 * s * r2 * r + v.p_yy * s * s - 0.5 * v.a * v.a - 0.5 * phi * phi * s * s -
         v.a * v.yds;
  return Poly(std::move(q));
}

}  // namespace

Poly assemble_p0(const PointInvariants& inv) { return Poly{inv.sigma, 0.0, -3 * inv.rho}; }

Poly assemble_p1(const PointInvariants& inv) {
  const Terms v(inv);
  const double r = v.rho, s = v.sigma, phi = v.phi;
  const double r2 = r * r;
  const double d = 3 * r * phi - s;
  Poly::Coeffs c = Poly::Coeffs::Zero(9);
  c[8] = 31.5 * r2;
  c[6] = -12 * r * s;
  c[4] = 12 * r * s * phi - 63 * r2 * phi * phi + 3 * r * v.uds + 0.5 * v.c * v.c + 0.5 * d * d +
         1.5 * r * v.uu_ddrho - 9 * r2 * v.p_uu;
  c[3] = 7.5 * r2 * r * v.mu + 2.5 * v.tau * r2 + 7.5 * r2 * v.uu_dy;
  c[2] = d * v.uds + 21 * r * phi * phi * s - 3 * phi * s * s + v.a * v.c + 25.0 / 8.0 * r2 * r2 +
         3 * r * v.uu_dl + 6 * r * s * v.p_uu - 0.5 * s * v.uu_ddrho;
  c[1] = 2.5 * r2 * v.a - 2.5 * v.uu_dy * s * r;
  c[0] = -s * phi * v.uds + 0.5 * v.a * v.a - 0.5 * phi * phi * s * s - s * (v.uu_dl + s * v.p_uu);
  return Poly(std::move(c));
}

Poly assemble_p2(const PointInvariants& inv) {
  const Terms v(inv);
  const Poly quad{v.a, v.b, v.c};
  const Poly lead{v.sigma, 0.0, -15 * v.rho};
  return lead * quad * quad + assemble_p0(inv) * q_part(v);
}

double p2_tilde(const PointInvariants& inv, double t) {
  const Terms v(inv);
  const double quad = v.a + v.b * t + v.c * t * t;
  const double ratio = (v.sigma - 15 * v.rho * t * t) / (v.sigma - 3 * v.rho * t * t);
  return ratio * quad * quad + q_part(v)(t);
}

Poly assemble_p3(const PointInvariants& inv, const Settings& settings) {
  if (!(inv.rho > settings.tol_flat * settings.tol_flat))
    throw DivisionByRho("rho vanishes at the point; P3 is undefined");
  const Terms v(inv);
  const double r = v.rho, s = v.sigma, phi = v.phi, mu = v.mu, tau = v.tau, ell = v.ell;
  Poly::Coeffs c = Poly::Coeffs::Zero(7);
  c[6] = -6 * tau;
  c[5] = 18 * r * r;
  c[4] = 3 * v.yds + 24 * v.a - 6 * s * mu;
  c[3] = 13 * s * r;
  c[2] = (3 * phi - s / r) * v.yds + 30 * mu * phi * s + 30 * phi * r * ell + 30 * phi * phi * tau -
         (3 * mu + tau / r) * v.uds - 10 * s * ell + 3 * r * v.eps_dl;
  c[1] = 25 * phi * s * r - 2.5 * r * v.uds - 8 * s * s;
  c[0] = -phi * s / r * v.yds - v.uds * (ell + phi * tau / r) - v.eps_dl * s;
  return Poly(std::move(c));
}

Constraints assemble(const PointInvariants& inv, const Settings& settings) {
  // rho^{1/3} has the conformal weight of F, so trimming in these units
  // gives the same degrees for every representative metric.
  const double tol = settings.tol_trim;
  const double t0 = inv.rho > 0 ? std::cbrt(inv.rho) : 1.0;
  return {assemble_p0(inv).trimmed(tol, t0), assemble_p1(inv).trimmed(tol, t0), assemble_p2(inv).trimmed(tol, t0),
          assemble_p3(inv, settings).trimmed(tol, t0)};
}

}  // namespace mew
