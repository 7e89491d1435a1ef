#pragma once

#include "mew/jet.hpp"

namespace mew {

/// Numerical knobs shared by the invariant, constraint and analysis layers.
struct Settings {
  int jet_order = kDefaultJetOrder;

  /// |Y|_g <= tol_flat * max(|grad P|_g, 1) marks a flat point.
  double tol_flat = 1e-10;
  /// |sigma| <= tol_sigma * |Y|_g |W|_g is treated as sigma = 0.
  double tol_sigma = 1e-10;

  /// Leading polynomial coefficients below tol_trim * max|c| are dropped,
  /// with t measured in units of rho^{1/3}.
  double tol_trim = 1e-12;

  /// Backward-error threshold for accepting a polynomial root.
  double tol_root = 1e-7;
  /// Normalized resultants below tol_res_low vanish; above tol_res_high they do not.
  double tol_res_low = 1e-7;
  double tol_res_high = 1e-4;

  /// Relative residual below which a candidate solution counts as verified.
  double tol_residual = 1e-8;
  /// Relative metric norm of M_ab below which it counts as zero.
  double tol_m = 1e-8;
  /// |P0(F)| relative to its scale below which P0(F) counts as zero.
  double tol_p0 = 1e-8;

  /// Spacing of the 5x5 root-tracking grid used to differentiate reconstructed fields.
  double tracking_step = 1e-3;

  /// Worker threads for region scans; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

}  // namespace mew
