#pragma once

// Truncated bivariate Taylor expansions.
//
// A Jet<Scalar> of order J stores the Taylor coefficients
//   c(i, j) = d^i/dx^i d^j/dy^j f / (i! j!)
// of a scalar field at a base point, for all i + j <= J. Arithmetic on jets
// is exact for polynomial inputs of total degree <= J, so every partial
// derivative up to order J comes out without finite-difference error.
//
// Binary operations on jets of different order produce a jet of the smaller
// order. Differentiation lowers the order by one.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "mew/errors.hpp"

namespace mew {

inline constexpr int kDefaultJetOrder = 6;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename Scalar>
class Jet {
 public:
  using scalar_type = Scalar;
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Jet() : Jet(0) {}

  explicit Jet(int order, Scalar value = Scalar(0), std::array<double, 2> base = {0.0, 0.0})
      : order_(order), base_(base), coeffs_(Coeffs::Zero(size_for(order))) {
    assert(order >= 0);
    coeffs_[0] = value;
  }

  static Jet constant(int order, Scalar value, std::array<double, 2> base = {0.0, 0.0}) {
    return Jet(order, value, base);
  }

  /// Jet of the coordinate function x (axis 0) or y (axis 1) at `base`.
  static Jet coordinate(int order, int axis, std::array<double, 2> base) {
    Jet j(order, Scalar(base[axis]), base);
    if (order >= 1) j(axis == 0 ? 1 : 0, axis == 0 ? 0 : 1) = Scalar(1);
    return j;
  }

  static constexpr int size_for(int order) { return (order + 1) * (order + 2) / 2; }
  static constexpr int index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }

  int order() const { return order_; }
  const std::array<double, 2>& base() const { return base_; }
  const Coeffs& coeffs() const { return coeffs_; }

  Scalar& operator()(int i, int j) {
    assert(i >= 0 && j >= 0 && i + j <= order_);
    return coeffs_[index(i, j)];
  }
  const Scalar& operator()(int i, int j) const {
    assert(i >= 0 && j >= 0 && i + j <= order_);
    return coeffs_[index(i, j)];
  }

  Scalar value() const { return coeffs_[0]; }

  /// d^i/dx^i d^k/dy^k at the base point.
  Scalar derivative(int i, int k) const {
    if (i < 0 || k < 0 || i + k > order_) throw OrderExceeded(i + k, order_);
    return coeffs_[index(i, k)] * Scalar(factorial(i) * factorial(k));
  }

  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet out(order, Scalar(0), base_);
    out.coeffs_ = coeffs_.head(size_for(order));
    return out;
  }

  template <typename Other>
  Jet<Other> cast() const {
    Jet<Other> out(order_, Other(0), base_);
    for (int k = 0; k < coeffs_.size(); ++k) out.coeffs_[k] = Other(coeffs_[k]);
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (int k = 0; k < coeffs_.size(); ++k) m = std::max(m, static_cast<double>(std::abs(coeffs_[k])));
    return m;
  }

  // --- in-place arithmetic -------------------------------------------------

  Jet& operator+=(const Jet& b) { return combine(b, Scalar(1)); }
  Jet& operator-=(const Jet& b) { return combine(b, Scalar(-1)); }
  Jet& operator+=(Scalar s) {
    coeffs_[0] += s;
    return *this;
  }
  Jet& operator-=(Scalar s) {
    coeffs_[0] -= s;
    return *this;
  }
  Jet& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }
  Jet& operator/=(Scalar s) {
    coeffs_ /= s;
    return *this;
  }

  static double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

 private:
  template <typename>
  friend class Jet;

  Jet& combine(const Jet& b, Scalar sign) {
    assert(base_ == b.base_);
    if (b.order_ < order_) *this = truncated(b.order_);
    coeffs_ += sign * b.coeffs_.head(coeffs_.size());
    return *this;
  }

  int order_ = 0;
  std::array<double, 2> base_{0.0, 0.0};
  Coeffs coeffs_;
};

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

template <typename S>
Jet<S> operator-(Jet<S> a) {
  a *= S(-1);
  return a;
}
template <typename S>
Jet<S> operator+(Jet<S> a, const Jet<S>& b) {
  return a += b;
}
template <typename S>
Jet<S> operator-(Jet<S> a, const Jet<S>& b) {
  return a -= b;
}
template <typename S>
Jet<S> operator+(Jet<S> a, S s) {
  return a += s;
}
template <typename S>
Jet<S> operator+(S s, Jet<S> a) {
  return a += s;
}
template <typename S>
Jet<S> operator-(Jet<S> a, S s) {
  return a -= s;
}
template <typename S>
Jet<S> operator-(S s, const Jet<S>& a) {
  return -a + s;
}
template <typename S>
Jet<S> operator*(Jet<S> a, S s) {
  return a *= s;
}
template <typename S>
Jet<S> operator*(S s, Jet<S> a) {
  return a *= s;
}
template <typename S>
Jet<S> operator/(Jet<S> a, S s) {
  return a /= s;
}

// Mixed real/complex helpers so that `2.0 * jet` works for complex jets.
template <typename S, typename = std::enable_if_t<is_complex<S>::value>>
Jet<S> operator*(double s, Jet<S> a) {
  return a *= S(s);
}
template <typename S, typename = std::enable_if_t<is_complex<S>::value>>
Jet<S> operator*(Jet<S> a, double s) {
  return a *= S(s);
}
template <typename S, typename = std::enable_if_t<is_complex<S>::value>>
Jet<S> operator+(Jet<S> a, double s) {
  return a += S(s);
}
template <typename S, typename = std::enable_if_t<is_complex<S>::value>>
Jet<S> operator+(double s, Jet<S> a) {
  return a += S(s);
}
template <typename S, typename = std::enable_if_t<is_complex<S>::value>>
Jet<S> operator-(double s, const Jet<S>& a) {
  return S(s) - a;
}
template <typename S, typename = std::enable_if_t<is_complex<S>::value>>
Jet<S> operator-(Jet<S> a, double s) {
  return a -= S(s);
}
template <typename S, typename = std::enable_if_t<is_complex<S>::value>>
Jet<S> operator/(Jet<S> a, double s) {
  return a /= S(s);
}

template <typename S>
Jet<S> operator*(const Jet<S>& a, const Jet<S>& b) {
  assert(a.base() == b.base());
  const int order = std::min(a.order(), b.order());
  Jet<S> out(order, S(0), a.base());
  for (int d1 = 0; d1 <= order; ++d1) {
    for (int j1 = 0; j1 <= d1; ++j1) {
      const S av = a(d1 - j1, j1);
      if (av == S(0)) continue;
      for (int d2 = 0; d1 + d2 <= order; ++d2) {
        for (int j2 = 0; j2 <= d2; ++j2) {
          out(d1 - j1 + d2 - j2, j1 + j2) += av * b(d2 - j2, j2);
        }
      }
    }
  }
  return out;
}

/// f o g for an analytic univariate f given by its Taylor coefficients
/// f_series[k] = f^(k)(g0) / k! about the constant term g0 of g.
template <typename S>
Jet<S> compose(const std::vector<S>& f_series, const Jet<S>& g) {
  const int order = g.order();
  assert(static_cast<int>(f_series.size()) >= order + 1);
  Jet<S> h = g;
  h(0, 0) = S(0);
  // Horner on the nilpotent part: f0 + h (f1 + h (f2 + ...)).
  Jet<S> acc(order, f_series[order], g.base());
  for (int k = order - 1; k >= 0; --k) {
    acc = acc * h;
    acc(0, 0) += f_series[k];
  }
  return acc;
}

template <typename S>
Jet<S> reciprocal(const Jet<S>& b) {
  const S b0 = b.value();
  if (b0 == S(0)) throw DegenerateDivision(b.base(), "division by a jet with zero constant term");
  std::vector<S> series(b.order() + 1);
  S p = S(1) / b0;
  for (int k = 0; k <= b.order(); ++k) {
    series[k] = p;
    p *= -S(1) / b0;
  }
  return compose(series, b);
}

template <typename S>
Jet<S> operator/(const Jet<S>& a, const Jet<S>& b) {
  return a * reciprocal(b);
}
template <typename S>
Jet<S> operator/(S s, const Jet<S>& b) {
  return reciprocal(b) * s;
}

/// d/dx (axis 0) or d/dy (axis 1). Output order is one less than the input.
template <typename S>
Jet<S> partial(const Jet<S>& a, int axis) {
  if (a.order() == 0) throw OrderExceeded(1, 0);
  Jet<S> out(a.order() - 1, S(0), a.base());
  for (int d = 0; d <= out.order(); ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      out(i, j) = axis == 0 ? S(i + 1) * a(i + 1, j) : S(j + 1) * a(i, j + 1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elementary functions
// ---------------------------------------------------------------------------

template <typename S>
Jet<S> exp(const Jet<S>& g) {
  using std::exp;
  std::vector<S> series(g.order() + 1);
  const S e = exp(g.value());
  for (int k = 0; k <= g.order(); ++k) series[k] = e / S(Jet<S>::factorial(k));
  return compose(series, g);
}

template <typename S>
Jet<S> log(const Jet<S>& g) {
  using std::log;
  const S c = g.value();
  if constexpr (!is_complex<S>::value) {
    if (!(c > 0)) throw DomainError("ln of a non-positive value");
  } else {
    if (c == S(0)) throw DomainError("ln of zero");
  }
  std::vector<S> series(g.order() + 1);
  series[0] = log(c);
  S p = S(1);
  for (int k = 1; k <= g.order(); ++k) {
    p /= c;
    series[k] = (k % 2 == 1 ? S(1) : S(-1)) * p / S(k);
  }
  return compose(series, g);
}

template <typename S>
Jet<S> sin(const Jet<S>& g) {
  using std::cos;
  using std::sin;
  const S s = sin(g.value()), c = cos(g.value());
  const std::array<S, 4> cycle{s, c, -s, -c};
  std::vector<S> series(g.order() + 1);
  for (int k = 0; k <= g.order(); ++k) series[k] = cycle[k % 4] / S(Jet<S>::factorial(k));
  return compose(series, g);
}

template <typename S>
Jet<S> cos(const Jet<S>& g) {
  using std::cos;
  using std::sin;
  const S s = sin(g.value()), c = cos(g.value());
  const std::array<S, 4> cycle{c, -s, -c, s};
  std::vector<S> series(g.order() + 1);
  for (int k = 0; k <= g.order(); ++k) series[k] = cycle[k % 4] / S(Jet<S>::factorial(k));
  return compose(series, g);
}

/// g^p for real p about a positive base value (binomial series).
template <typename S>
Jet<S> pow(const Jet<S>& g, double p) {
  using std::pow;
  const S c = g.value();
  if constexpr (!is_complex<S>::value) {
    if (!(c > 0)) throw DomainError("non-integer power of a non-positive value");
  }
  std::vector<S> series(g.order() + 1);
  S coeff = pow(c, S(p));
  for (int k = 0; k <= g.order(); ++k) {
    series[k] = coeff;
    coeff *= S((p - k) / (k + 1)) / c;
  }
  return compose(series, g);
}

template <typename S>
Jet<S> sqrt(const Jet<S>& g) {
  if constexpr (!is_complex<S>::value) {
    if (!(g.value() > 0)) throw DomainError("sqrt of a non-positive value");
  }
  return pow(g, 0.5);
}

/// Integer power by repeated squaring; negative exponents go through reciprocal.
template <typename S>
Jet<S> ipow(const Jet<S>& g, int n) {
  if (n < 0) return reciprocal(ipow(g, -n));
  Jet<S> result(g.order(), S(1), g.base());
  Jet<S> base = g;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace mew
