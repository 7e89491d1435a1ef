#pragma once

// The polynomial constraints in the indeterminate t (standing for F) at a
// point. P0(t) = sigma - 3 rho t^2; P1, P2 = P0 * P2~ and P3 have
// coefficients built from the point invariants.

#include "mew/invariants.hpp"
#include "mew/poly.hpp"
#include "mew/settings.hpp"

namespace mew {

Poly assemble_p0(const PointInvariants& inv);
Poly assemble_p1(const PointInvariants& inv);
/// P2 = (sigma - 15 rho t^2)(A + B t + C t^2)^2 + P0(t) Q(t) with
/// A = rho ell + tau phi, B = 5/2 rho^2, C = tau + 3 mu rho.
Poly assemble_p2(const PointInvariants& inv);
/// Throws DivisionByRho when rho is below the flatness tolerance.
Poly assemble_p3(const PointInvariants& inv, const Settings& settings = {});

/// The rational form P2~(t) evaluated directly, for t with P0(t) != 0.
double p2_tilde(const PointInvariants& inv, double t);

struct Constraints {
  Poly p0, p1, p2, p3;
};

/// All four polynomials with negligible leading coefficients trimmed
/// (see Settings::tol_trim).
Constraints assemble(const PointInvariants& inv, const Settings& settings = {});

}  // namespace mew
