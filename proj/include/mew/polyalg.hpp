#pragma once

// Resultants, root finding and common-root detection for Poly.

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "mew/poly.hpp"
#include "mew/settings.hpp"

namespace mew {

/// Sylvester determinant of max-normalized inputs. The raw resultant is
/// normalized * factor with factor = |P|^deg Q * |Q|^deg P.
struct Resultant {
  double normalized = 0.0;
  double factor = 1.0;
  double value() const { return normalized * factor; }
};

/// Rows: deg Q shifted copies of P (highest degree first), then deg P copies of Q.
Eigen::MatrixXd sylvester_matrix(const Poly& p, const Poly& q);

/// Throws ZeroPolynomial for a zero input; a constant input gives its power.
Resultant sylvester_resultant(const Poly& p, const Poly& q);

/// All complex roots with multiplicity, from the companion matrix of the
/// argument-balanced polynomial. Exact zero roots are split off first.
std::vector<std::complex<double>> complex_roots(const Poly& p);

struct RealRoot {
  double value = 0.0;
  int multiplicity = 1;
  /// Normwise backward error of the source polynomial at the root.
  double residual = 0.0;
};

struct RootSet {
  std::vector<RealRoot> roots;  // ascending
  bool empty() const { return roots.empty(); }
  std::size_t size() const { return roots.size(); }
  std::vector<double> values() const;
};

/// |P(z)| / (max|c_k| * sum |z|^k): the smallest relative coefficient
/// perturbation that makes z an exact root.
double backward_error(const Poly& p, std::complex<double> z);

/// Real roots, clustered with multiplicity and Newton-polished; a root is kept
/// when its backward error is below settings.tol_root.
RootSet real_roots(const Poly& p, const Settings& settings = {});

/// Real roots of the lowest-degree input that are roots of all three inputs
/// and not roots of `exclude`. Throws ZeroPolynomial for a zero input.
RootSet common_real_roots(const Poly& p1, const Poly& p2, const Poly& p3, const Poly& exclude,
                          const Settings& settings = {});

/// Power of two close to the geometric mean of the nonzero root moduli of the
/// inputs; substituting t -> s t balances them.
double balancing_scale(const std::vector<Poly>& ps);

/// Scale-aware test statistic for Res(P, Q) = 0: the larger of
/// min over roots z of P of backward_error(Q, z) and the symmetric term.
/// Zero exactly when P and Q share a root. Computed on P(s t), Q(s t).
double common_root_indicator(const Poly& p, const Poly& q, double scale = 1.0);

}  // namespace mew
