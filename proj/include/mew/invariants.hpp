#pragma once

// Conformal invariants of a Möbius structure at a point.
//
// Starting from the Cotton-York 1-form Y_c = eps^{ab}(grad_a P_bc - grad_b P_ac)
// every quantity below is built by index-explicit contraction in 2D:
//
//   U^a   = eps^{ab} Y_b                       rho = Y_a Y^a
//   mu    = grad_c Y^c / 2                     phi = grad_c U^c / 2
//   W_a   = Y^c grad_c U_a + phi Y_a - 3 mu U_a
//   sigma = Y^a W_a                            tau = U^a W_a
//   ell   = 3 mu phi + P_ab U^a Y^b - Y^c grad_c phi
//   L_a   = Y_a ell - eps_ab W^b phi
//
// and, for the P0(F) = 0 branch,
//   m = sigma / (3 rho) + phi,   psi = 3 mu m + P_ca U^c Y^a - Y^c grad_c m,
//   k = -(3 rho / 20)(ell/sigma + mu/rho + tau/(3 rho^2) + tau phi/(rho sigma))
//       + 3 (psi rho + tau m) / (4 sigma),
//   alpha_a = (k Y_a - m U_a) / rho,
//   M_ab = grad_(a alpha_b) + alpha_a alpha_b + P_ab - 1/2 alpha_c alpha^c g_ab.

#include <array>
#include <optional>

#include "mew/geom.hpp"
#include "mew/settings.hpp"

namespace mew {

using Vec2 = std::array<double, 2>;

struct CottonYork {
  Tensor<double> yabc;  // Y_abc, all indices down, weight 0
  Tensor<double> y;     // Y_c, weight -2
  double norm = 0.0;    // |Y|_g at the point
  double scale = 0.0;   // |grad P|_g at the point
  bool flat = false;
};

CottonYork cotton_york(const LocalStructure& local, const Settings& settings = {});
CottonYork cotton_york(const MoebiusStructure& s, Point p, const Settings& settings = {});

/// Jet-valued invariant fields around a non-flat point. Every tensor carries
/// its conformal weight; 1-forms are index-down unless named *_up.
struct InvariantFields {
  LocalStructure local;
  CottonYork cy;
  Tensor<double> y{}, y_up{}, u{}, u_up{}, w{}, w_up{}, l{};
  Jet<double> rho{}, mu{}, phi{}, sigma{}, tau{}, ell{};
  Tensor<double> grad_y{}, grad_u{}, grad_l{}, grad_rho{}, hess_rho{}, grad_sigma{}, grad_phi{};

  const LocalGeometry& geometry() const { return local.geometry; }
  Point point() const { return local.geometry.base(); }
};

/// Throws FlatPoint when |Y| is below the flatness tolerance.
InvariantFields invariant_fields(const MoebiusStructure& s, Point p, const Settings& settings = {});

/// Values at the base point of every scalar and vector invariant.
struct PointInvariants {
  Point point;
  int orientation = 1;
  double metric_factor = 1.0;  // e^{2u}

  Vec2 y{}, u{}, u_up{}, w{}, l{}, grad_rho{};
  double rho = 0, mu = 0, phi = 0, sigma = 0, tau = 0, ell = 0;

  double uu_hess_rho = 0;   // U^a U^b grad_a grad_b rho
  double yy_hess_rho = 0;   // Y^a Y^b grad_a grad_b rho
  double u_grad_sigma = 0;  // U^a grad_a sigma
  double y_grad_sigma = 0;  // Y^a grad_a sigma
  double uu_grad_y = 0;     // U^a U^b grad_b Y_a
  double yy_grad_u = 0;     // Y^a Y^b grad_b U_a
  double uu_grad_l = 0;     // U^a U^b grad_b L_a
  double yy_grad_l = 0;     // Y^a Y^b grad_b L_a
  double eps_grad_l = 0;    // eps^{ab} grad_b L_a
  double p_uu = 0, p_yy = 0, p_uy = 0;

  double m = 0, psi = 0;
  std::optional<double> k;  // undefined when sigma = 0

  /// Metric pairing of two 1-forms at the point.
  double dot(const Vec2& a, const Vec2& b) const { return (a[0] * b[0] + a[1] * b[1]) / metric_factor; }
  /// eps_ab v^b for a 1-form v_b (index raised with g).
  Vec2 eps_lower_raised(const Vec2& v) const {
    return {orientation * v[1], -orientation * v[0]};
  }
};

PointInvariants point_invariants(const InvariantFields& f);
PointInvariants compute_invariants(const MoebiusStructure& s, Point p, const Settings& settings = {});

struct MTensor {
  std::array<double, 4> m{};  // M_11, M_12, M_21, M_22
  Vec2 alpha{};               // alpha_a of the P0 = 0 branch
  double norm = 0.0;          // metric norm of M_ab
  double scale = 0.0;         // 1 + |P|_g + |alpha|_g^2
  double k = 0, m_scalar = 0, psi = 0;
  double relative_norm() const { return norm / scale; }
};

/// Throws SigmaZero unless sigma > 0 (the real P0 = 0 branch needs sigma = 3 rho F^2),
/// FlatPoint at flat points.
MTensor compute_m(const InvariantFields& f, const Settings& settings = {});
MTensor compute_m(const MoebiusStructure& s, Point p, const Settings& settings = {});

/// True when |sigma| is below the sigma tolerance relative to |Y||W|.
bool sigma_vanishes(const InvariantFields& f, const Settings& settings = {});

}  // namespace mew
