#include "mew/invariants.hpp"

#include <cmath>
#include <sstream>

#include "mew/errors.hpp"

namespace mew {

namespace {

using J = Jet<double>;
using T = Tensor<double>;

// v^a w_a
J pair(const T& up, const T& down) { return up.at(0) * down.at(0) + up.at(1) * down.at(1); }

// T_ab a^a b^b
J bilinear(const T& t, const T& a, const T& b) {
  J out = t.at(0, 0) * a.at(0) * b.at(0);
  out += t.at(0, 1) * a.at(0) * b.at(1);
  out += t.at(1, 0) * a.at(1) * b.at(0);
  out += t.at(1, 1) * a.at(1) * b.at(1);
  return out;
}

std::string where(Point p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

Vec2 values(const T& t) { return {t.at(0).value(), t.at(1).value()}; }

}  // namespace

CottonYork cotton_york(const LocalStructure& local, const Settings& settings) {
  const LocalGeometry& g = local.geometry;
  const T grad_p = g.covariant_derivative(local.rho);  // slots (a, b, c) = grad_a P_bc

  std::vector<J> yabc;
  yabc.reserve(8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) yabc.push_back(grad_p.at(a, b, c) - grad_p.at(b, a, c));
  T yt({Slot::Down, Slot::Down, Slot::Down}, 0, std::move(yabc));

  // Y_c = eps^{ab} Y_abc; only the off-diagonal eps entries survive
  const J e12 = g.eps_upper(0, 1);
  T y = T::form(e12 * (yt.at(0, 1, 0) - yt.at(1, 0, 0)), e12 * (yt.at(0, 1, 1) - yt.at(1, 0, 1)), -2);

  CottonYork out{std::move(yt), std::move(y)};
  const double inv = g.inverse_factor().value();
  out.norm = std::sqrt(std::max(0.0, g.dot(out.y, out.y).value()));
  double sq = 0.0;
  for (std::size_t i = 0; i < grad_p.size(); ++i) sq += grad_p[i].value() * grad_p[i].value();
  out.scale = std::sqrt(sq * inv * inv * inv);
  // the floor keeps structures with grad P = 0 from comparing roundoff against roundoff
  out.flat = out.norm <= settings.tol_flat * std::max(out.scale, 1.0);
  return out;
}

CottonYork cotton_york(const MoebiusStructure& s, Point p, const Settings& settings) {
  return cotton_york(localize(s, p, settings.jet_order), settings);
}

InvariantFields invariant_fields(const MoebiusStructure& s, Point p, const Settings& settings) {
  LocalStructure local = localize(s, p, settings.jet_order);
  CottonYork cy = cotton_york(local, settings);
  if (cy.flat) throw FlatPoint("Cotton-York tensor vanishes at " + where(p));

  InvariantFields f{std::move(local), std::move(cy)};
  const LocalGeometry& g = f.local.geometry;
  const T& P = f.local.rho;
  const J half_inv = g.inverse_factor() * 0.5;

  f.y = f.cy.y;
  f.y_up = g.raise(f.y);
  // U^a = eps^{ab} Y_b
  f.u_up = T::vector(g.eps_upper(0, 1) * f.y.at(1), g.eps_upper(1, 0) * f.y.at(0), -4);
  f.u = g.lower(f.u_up);
  f.rho = pair(f.y_up, f.y);

  f.grad_y = g.covariant_derivative(f.y);
  f.grad_u = g.covariant_derivative(f.u);
  f.mu = half_inv * (f.grad_y.at(0, 0) + f.grad_y.at(1, 1));
  f.phi = half_inv * (f.grad_u.at(0, 0) + f.grad_u.at(1, 1));

  // W_a = Y^c grad_c U_a + phi Y_a - 3 mu U_a
  std::array<J, 2> w;
  for (int a = 0; a < 2; ++a)
    w[a] = f.y_up.at(0) * f.grad_u.at(0, a) + f.y_up.at(1) * f.grad_u.at(1, a) + f.phi * f.y.at(a) -
           f.mu * f.u.at(a) * 3.0;
  f.w = T::form(w[0], w[1], -6);
  f.w_up = g.raise(f.w);
  f.sigma = pair(f.y_up, f.w);
  f.tau = pair(f.u_up, f.w);

  f.grad_phi = g.covariant_derivative(T::scalar(f.phi, -4));
  f.ell = f.mu * f.phi * 3.0 + bilinear(P, f.u_up, f.y_up) - pair(f.y_up, f.grad_phi);

  // L_a = Y_a ell - eps_ab W^b phi
  f.l = T::form(f.y.at(0) * f.ell - g.eps_lower(0, 1) * f.w_up.at(1) * f.phi,
                f.y.at(1) * f.ell - g.eps_lower(1, 0) * f.w_up.at(0) * f.phi, -10);
  f.grad_l = g.covariant_derivative(f.l);

  f.grad_rho = g.covariant_derivative(T::scalar(f.rho, -6));
  f.hess_rho = g.covariant_derivative(f.grad_rho);
  f.grad_sigma = g.covariant_derivative(T::scalar(f.sigma, -10));
  return f;
}

bool sigma_vanishes(const InvariantFields& f, const Settings& settings) {
  const double y = std::sqrt(std::max(0.0, f.rho.value()));
  const double w = std::sqrt(std::max(0.0, f.geometry().dot(f.w, f.w).value()));
  return std::abs(f.sigma.value()) <= settings.tol_sigma * y * w;
}

namespace {

struct MBranch {
  J m, psi, k;
  T alpha;
};

// m, psi, k and alpha_a = (k Y_a - m U_a) / rho as jets
MBranch m_branch(const InvariantFields& f) {
  const LocalGeometry& g = f.geometry();
  const J m = f.sigma / (f.rho * 3.0) + f.phi;
  const T grad_m = g.covariant_derivative(T::scalar(m, -4));
  const J psi = f.mu * m * 3.0 + bilinear(f.local.rho, f.u_up, f.y_up) - pair(f.y_up, grad_m);
  const J& rho = f.rho;
  const J& sigma = f.sigma;
  const J bracket = f.ell / sigma + f.mu / rho + f.tau / (rho * rho * 3.0) + f.tau * f.phi / (rho * sigma);
  const J k = -(rho * (3.0 / 20.0)) * bracket + (psi * rho + f.tau * m) * 3.0 / (sigma * 4.0);
  T alpha = T::form((k * f.y.at(0) - m * f.u.at(0)) / rho, (k * f.y.at(1) - m * f.u.at(1)) / rho, 2);
  return {m, psi, k, std::move(alpha)};
}

}  // namespace

PointInvariants point_invariants(const InvariantFields& f) {
  const LocalGeometry& g = f.geometry();
  const T& P = f.local.rho;
  PointInvariants pi;
  pi.point = f.point();
  pi.orientation = g.orientation();
  pi.metric_factor = g.factor().value();

  pi.y = values(f.y);
  pi.u = values(f.u);
  pi.u_up = values(f.u_up);
  pi.w = values(f.w);
  pi.l = values(f.l);
  pi.grad_rho = values(f.grad_rho);
  pi.rho = f.rho.value();
  pi.mu = f.mu.value();
  pi.phi = f.phi.value();
  pi.sigma = f.sigma.value();
  pi.tau = f.tau.value();
  pi.ell = f.ell.value();

  const double eps12 = g.eps_upper(0, 1).value();
  const Vec2 yu = values(f.y_up), uu = pi.u_up;
  auto contract2 = [](const T& t, const Vec2& a, const Vec2& b, bool swap) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += a[i] * b[j] * (swap ? t.at(j, i) : t.at(i, j)).value();
    return s;
  };
  pi.uu_hess_rho = contract2(f.hess_rho, uu, uu, false);
  pi.yy_hess_rho = contract2(f.hess_rho, yu, yu, false);
  pi.u_grad_sigma = uu[0] * f.grad_sigma.at(0).value() + uu[1] * f.grad_sigma.at(1).value();
  pi.y_grad_sigma = yu[0] * f.grad_sigma.at(0).value() + yu[1] * f.grad_sigma.at(1).value();
  // U^a U^b grad_b Y_a: the derivative slot comes first in grad_y
  pi.uu_grad_y = contract2(f.grad_y, uu, uu, true);
  pi.yy_grad_u = contract2(f.grad_u, yu, yu, true);
  pi.uu_grad_l = contract2(f.grad_l, uu, uu, true);
  pi.yy_grad_l = contract2(f.grad_l, yu, yu, true);
  // eps^{ab} grad_b L_a
  pi.eps_grad_l = eps12 * (f.grad_l.at(1, 0).value() - f.grad_l.at(0, 1).value());
  pi.p_uu = contract2(P, uu, uu, false);
  pi.p_yy = contract2(P, yu, yu, false);
  pi.p_uy = contract2(P, uu, yu, false);

  pi.m = pi.sigma / (3.0 * pi.rho) + pi.phi;
  {
    const J m = f.sigma / (f.rho * 3.0) + f.phi;
    const T grad_m = g.covariant_derivative(T::scalar(m, -4));
    pi.psi = 3.0 * pi.mu * pi.m + pi.p_uy - (yu[0] * grad_m.at(0).value() + yu[1] * grad_m.at(1).value());
  }
  if (pi.sigma != 0.0) {
    const double r = pi.rho, s = pi.sigma;
    pi.k = -(3.0 * r / 20.0) * (pi.ell / s + pi.mu / r + pi.tau / (3.0 * r * r) + pi.tau * pi.phi / (r * s)) +
           3.0 * (pi.psi * r + pi.tau * pi.m) / (4.0 * s);
  }
  return pi;
}

PointInvariants compute_invariants(const MoebiusStructure& s, Point p, const Settings& settings) {
  return point_invariants(invariant_fields(s, p, settings));
}

MTensor compute_m(const InvariantFields& f, const Settings& settings) {
  if (sigma_vanishes(f, settings))
    throw SigmaZero("sigma vanishes at " + where(f.point()) + "; the M_ab branch is undefined");
  if (f.sigma.value() < 0.0)
    throw SigmaZero("sigma < 0 at " + where(f.point()) + "; P0(F) = sigma - 3 rho F^2 has no real root");
  const LocalGeometry& g = f.geometry();
  MBranch b = m_branch(f);
  const T grad_alpha = g.covariant_derivative(b.alpha);
  const J sq = g.dot(b.alpha, b.alpha);

  MTensor out;
  double norm_sq = 0.0, p_sq = 0.0;
  const double gi = g.inverse_factor().value();
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) {
      const double sym = 0.5 * (grad_alpha.at(a, c).value() + grad_alpha.at(c, a).value());
      const double aa = b.alpha.at(a).value() * b.alpha.at(c).value();
      const double pac = f.local.rho.at(a, c).value();
      double v = sym + aa + pac;
      if (a == c) v -= 0.5 * sq.value() * g.factor().value();
      out.m[2 * a + c] = v;
      norm_sq += v * v;
      p_sq += pac * pac;
    }
  out.alpha = values(b.alpha);
  out.norm = std::sqrt(norm_sq) * gi;
  out.scale = 1.0 + std::sqrt(p_sq) * gi + sq.value();
  out.k = b.k.value();
  out.m_scalar = b.m.value();
  out.psi = b.psi.value();
  return out;
}

MTensor compute_m(const MoebiusStructure& s, Point p, const Settings& settings) {
  return compute_m(invariant_fields(s, p, settings), settings);
}

}  // namespace mew
