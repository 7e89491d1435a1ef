#pragma once

// Real univariate polynomials, coefficients in ascending degree.

#include <complex>
#include <initializer_list>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace mew {

class Poly {
 public:
  using Coeffs = Eigen::VectorXd;

  /// The zero polynomial (no coefficients).
  Poly() = default;
  explicit Poly(Coeffs ascending);
  Poly(std::initializer_list<double> ascending);

  static Poly monomial(double c, int k);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.size() == 0; }
  const Coeffs& coeffs() const { return c_; }
  /// Coefficient of t^k; zero past the degree.
  double operator[](int k) const { return k >= 0 && k < c_.size() ? c_[k] : 0.0; }
  double leading() const { return is_zero() ? 0.0 : c_[c_.size() - 1]; }
  double norm_inf() const { return is_zero() ? 0.0 : c_.cwiseAbs().maxCoeff(); }

  /// Horner evaluation; T may be double or std::complex<double>.
  template <typename T>
  T operator()(const T& t) const {
    T acc(0);
    for (Eigen::Index k = c_.size() - 1; k >= 0; --k) acc = acc * t + c_[k];
    return acc;
  }

  /// P(s t)
  Poly scaled_argument(double s) const;
  /// P / max|c_k|
  Poly normalized() const;
  Poly derivative() const;
  /// Drops leading coefficients with |c_k| t0^k <= rel * max_j |c_j| t0^j,
  /// i.e. measures the coefficients with t in units of t0.
  Poly trimmed(double rel, double t0 = 1.0) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(double s, const Poly& a);
  friend Poly operator-(const Poly& a) { return -1.0 * a; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

 private:
  Coeffs c_;
};

struct DivMod {
  Poly quotient;
  Poly remainder;
};

/// Long division; throws ZeroPolynomial when dividing by zero.
DivMod divmod(const Poly& num, const Poly& den);

/// Coefficients as "c0 + c1 t + ..." with 17 significant digits.
std::string to_string(const Poly& p);

}  // namespace mew
