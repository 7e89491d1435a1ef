#pragma once

// Pointwise decision procedure for local solvability of the sf-MEW equation
//   grad_(a alpha_b) + alpha_a alpha_b + P_ab - 1/2 alpha_c alpha^c g_ab = 0,
// candidate reconstruction and verification, and region scans.

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mew/constraints.hpp"
#include "mew/geom.hpp"
#include "mew/invariants.hpp"
#include "mew/polyalg.hpp"
#include "mew/settings.hpp"

namespace mew {

enum class VerdictTag {
  Flat,
  MZeroAdmits,
  Obstructed,
  AdmitsRealCandidate,
  VanishingObstructionsNoRealSolution,
  Inconclusive,
};

std::string_view to_string(VerdictTag tag);

enum class CandidateSource { Alpha1Formula, MZeroFormula, UserSupplied };

std::string_view to_string(CandidateSource source);

/// A pointwise candidate (F, alpha_a) with F = eps^{ab} F_ab.
struct SolutionCandidate {
  double f = 0.0;
  Vec2 alpha{};
  CandidateSource source = CandidateSource::Alpha1Formula;
};

/// alpha_a = (L_a + 5/2 rho F Y_a + F^2/2 grad_a rho + 3 F^4 U_a) / (sigma - 3 rho F^2).
/// Throws P0Vanishes when sigma - 3 rho F^2 is zero to tolerance.
SolutionCandidate alpha_from_F(const PointInvariants& inv, double f, const Settings& settings = {});

struct P0Branch {
  double f = 0.0;
  /// F^2 = sigma / (3 rho) holds to tolerance (needs sigma > 0).
  bool consistent = false;
  /// |F^2 - sigma/(3 rho)| relative to F^2 + |sigma|/(3 rho).
  double mismatch = 0.0;
};

/// The F forced on the sigma = 3 rho F^2 branch,
///   F = -2/5 (rho ell + mu sigma + tau sigma/(3 rho) + tau phi) / rho^2.
P0Branch f_from_P0_branch(const PointInvariants& inv, const Settings& settings = {});

/// Residuals of a candidate at a point. Algebraic residuals need a non-flat
/// point; gradient_f only exists for tracked (reconstructed) candidates.
struct ResidualReport {
  std::complex<double> f;
  std::optional<double> constraint_u;  // |alpha_a U^a + F^2 + phi|
  std::optional<double> constraint_w;  // |alpha_a W^a - ell - 5/2 rho F - (3 mu + 3 alpha_c Y^c) F^2|
  double differential = 0.0;           // metric norm of the sf-MEW tensor
  double trace = 0.0;                  // |grad_a alpha^a + K|
  std::optional<double> gradient_f;    // |grad F + 2 alpha F + Y|_g from the tracked field
  /// Largest residual divided by the size of the terms it balances.
  double relative = 0.0;

  double max_abs() const;
};

/// Closed-form alpha_a = re_a + i im_a as expressions. Real mode ignores `im`.
struct AlphaExpressions {
  std::array<Expr, 2> re;
  std::array<Expr, 2> im;
};

enum class Mode { Real, Complex };

/// Residuals of a closed-form candidate, with grad alpha from jets and
/// F = eps^{ab} grad_a alpha_b.
ResidualReport verify_closed_form(const MoebiusStructure& s, const AlphaExpressions& alpha, Point p, Mode mode,
                                  const Settings& settings = {});

/// Residuals of a pointwise candidate. The field is reconstructed on a 5x5
/// grid of spacing settings.tracking_step by nearest-root continuation of F
/// (Alpha1Formula) or from the M_ab = 0 formula (MZeroFormula), and
/// differentiated with fourth-order central differences.
/// Throws GridTrackingFailed when the root branch cannot be continued.
ResidualReport verify_candidate(const MoebiusStructure& s, const SolutionCandidate& cand, Point p,
                                const Settings& settings = {});

struct CandidateResult {
  SolutionCandidate candidate;
  std::optional<ResidualReport> residuals;
  bool verified = false;
  std::string note;
};

struct Verdict {
  VerdictTag tag = VerdictTag::Inconclusive;
  Point point;
  std::string note;
  /// Raw Sylvester resultants Res(P1,P2), Res(P1,P3), Res(P2,P3).
  std::optional<std::array<double, 3>> resultants;
  /// Common-root indicators for the same pairs; these drive the decision.
  std::optional<std::array<double, 3>> indicators;
  std::vector<CandidateResult> candidates;
  /// Common complex roots of P1, P2, P3 off the real axis.
  std::vector<std::complex<double>> complex_candidates;
  std::optional<double> m_norm;

  /// Values of F with a verified candidate.
  std::vector<double> verified_f() const;
};

Verdict classify_point(const MoebiusStructure& s, Point p, const Settings& settings = {});

/// Common complex roots of the three polynomials that are not roots of `exclude`.
std::vector<std::complex<double>> common_complex_roots(const Poly& p1, const Poly& p2, const Poly& p3,
                                                       const Poly& exclude, const Settings& settings = {});

struct GridSpec {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
  int nx = 2, ny = 2;

  std::vector<Point> nodes() const;  // row-major in y, then x
};

struct RegionReport {
  GridSpec grid;
  std::vector<Verdict> nodes;
  std::map<VerdictTag, int> histogram;
  /// OBSTRUCTED, ADMITS (F = ...), NO REAL SOLUTION, FLAT, MZERO or MIXED.
  std::string summary;
  /// e.g. "Obstructed on 100.0% of non-flat nodes".
  std::string detail;
};

/// Classifies every node, in parallel over settings.threads workers.
RegionReport scan_region(const MoebiusStructure& s, const GridSpec& grid, const Settings& settings = {});
RegionReport scan_points(const MoebiusStructure& s, const std::vector<Point>& points, const Settings& settings = {});

}  // namespace mew
