#include "mew/poly.hpp"

#include <cmath>
#include <cstdio>

#include "mew/errors.hpp"

namespace mew {

namespace {

Poly::Coeffs trim_exact(Poly::Coeffs c) {
  Eigen::Index n = c.size();
  while (n > 0 && c[n - 1] == 0.0) --n;
  return c.head(n).eval();
}

}  // namespace

Poly::Poly(Coeffs ascending) : c_(trim_exact(std::move(ascending))) {}

Poly::Poly(std::initializer_list<double> ascending) {
  Coeffs c(static_cast<Eigen::Index>(ascending.size()));
  Eigen::Index i = 0;
  for (double v : ascending) c[i++] = v;
  c_ = trim_exact(std::move(c));
}

Poly Poly::monomial(double c, int k) {
  Coeffs v = Coeffs::Zero(k + 1);
  v[k] = c;
  return Poly(std::move(v));
}

Poly Poly::scaled_argument(double s) const {
  Coeffs out = c_;
  double p = 1.0;
  for (Eigen::Index k = 0; k < out.size(); ++k, p *= s) out[k] *= p;
  return Poly(std::move(out));
}

Poly Poly::normalized() const {
  const double n = norm_inf();
  return n == 0.0 ? *this : (1.0 / n) * *this;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return {};
  Coeffs out(c_.size() - 1);
  for (Eigen::Index k = 1; k < c_.size(); ++k) out[k - 1] = static_cast<double>(k) * c_[k];
  return Poly(std::move(out));
}

Poly Poly::trimmed(double rel, double t0) const {
  Coeffs w(c_.size());
  double power = 1.0;
  for (Eigen::Index k = 0; k < c_.size(); ++k, power *= t0) w[k] = std::abs(c_[k]) * power;
  const double cut = rel * (w.size() ? w.maxCoeff() : 0.0);
  Eigen::Index n = c_.size();
  while (n > 0 && w[n - 1] <= cut) --n;
  return Poly(c_.head(n).eval());
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly::Coeffs out = Poly::Coeffs::Zero(std::max(a.c_.size(), b.c_.size()));
  out.head(a.c_.size()) += a.c_;
  out.head(b.c_.size()) += b.c_;
  return Poly(std::move(out));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  Poly::Coeffs out = Poly::Coeffs::Zero(a.c_.size() + b.c_.size() - 1);
  for (Eigen::Index i = 0; i < a.c_.size(); ++i)
    for (Eigen::Index j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(out));
}

Poly operator*(double s, const Poly& a) { return Poly(Poly::Coeffs(s * a.c_)); }

DivMod divmod(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw ZeroPolynomial("division by the zero polynomial");
  const int dn = den.degree();
  if (num.degree() < dn) return {Poly(), num};
  Poly::Coeffs r = num.coeffs();
  Poly::Coeffs q = Poly::Coeffs::Zero(num.degree() - dn + 1);
  for (int k = num.degree() - dn; k >= 0; --k) {
    const double f = r[k + dn] / den.leading();
    q[k] = f;
    for (int j = 0; j <= dn; ++j) r[k + j] -= f * den[j];
    r[k + dn] = 0.0;
  }
  return {Poly(std::move(q)), Poly(r.head(dn).eval())};
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  char buf[64];
  for (int k = 0; k <= p.degree(); ++k) {
    if (p[k] == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(p[k]));
    s += s.empty() ? (p[k] < 0 ? "-" : "") : (p[k] < 0 ? " - " : " + ");
    s += buf;
    if (k == 1) s += " t";
    if (k > 1) s += " t^" + std::to_string(k);
  }
  return s;
}

}  // namespace mew
