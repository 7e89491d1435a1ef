#include "mew/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "mew/errors.hpp"

namespace mew {

namespace {

void require_nonzero(const Poly& p) {
  if (p.is_zero()) throw ZeroPolynomial("operation needs a nonzero polynomial");
}

double pow2_round(double v) { return std::exp2(std::round(std::log2(v))); }

// Modified Newton x <- x - m P/P', kept only while the backward error drops.
double polish(const Poly& p, const Poly& dp, double x, int m) {
  double best = backward_error(p, x);
  for (int it = 0; it < 8 && best > 0.0; ++it) {
    const double d = dp(x);
    if (d == 0.0) break;
    const double next = x - m * p(x) / d;
    const double e = backward_error(p, next);
    if (!(e < best)) break;
    x = next;
    best = e;
  }
  return x;
}

}  // namespace

std::vector<double> RootSet::values() const {
  std::vector<double> v;
  for (const auto& r : roots) v.push_back(r.value);
  return v;
}

Eigen::MatrixXd sylvester_matrix(const Poly& p, const Poly& q) {
  const int m = p.degree(), n = q.degree();
  const int size = m + n;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) s(i, i + k) = p[m - k];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) s(n + i, i + k) = q[n - k];
  return s;
}

Resultant sylvester_resultant(const Poly& p, const Poly& q) {
  require_nonzero(p);
  require_nonzero(q);
  const double np = p.norm_inf(), nq = q.norm_inf();
  const int m = p.degree(), n = q.degree();
  Resultant r;
  r.factor = std::pow(np, n) * std::pow(nq, m);
  if (m + n == 0) {
    r.normalized = 1.0;
    return r;
  }
  const Eigen::MatrixXd s = sylvester_matrix(p.normalized(), q.normalized());
  r.normalized = s.fullPivLu().determinant();
  return r;
}

std::vector<std::complex<double>> complex_roots(const Poly& p) {
  require_nonzero(p);
  std::vector<std::complex<double>> out;
  int low = 0;
  while (p[low] == 0.0) {
    out.emplace_back(0.0);
    ++low;
  }
  const int n = p.degree() - low;
  if (n == 0) return out;
  Poly::Coeffs c = p.coeffs().segment(low, n + 1);
  // Substitute t = s u so that the constant and leading coefficients balance.
  const double s = pow2_round(std::pow(std::abs(c[0] / c[n]), 1.0 / n));
  double f = 1.0;
  for (int k = 0; k <= n; ++k, f *= s) c[k] *= f;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) comp(0, k) = -c[n - 1 - k] / c[n];
  for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(s * es.eigenvalues()[k]);
  return out;
}

double backward_error(const Poly& p, std::complex<double> z) {
  const double n = p.norm_inf();
  if (n == 0.0) return 0.0;
  const double az = std::abs(z);
  double sum = 0.0, pw = 1.0;
  for (int k = 0; k <= p.degree(); ++k, pw *= az) sum += pw;
  return std::abs(p(z)) / (n * sum);
}

RootSet real_roots(const Poly& p, const Settings& settings) {
  require_nonzero(p);
  RootSet out;
  if (p.degree() < 1) return out;
  const Poly dp = p.derivative();
  // Real candidates: real parts of eigenvalues whose real part is a root to
  // working accuracy. Split multiple roots show up as nearby conjugate pairs.
  std::vector<double> cand;
  for (auto z : complex_roots(p)) {
    if (backward_error(p, z.real()) < settings.tol_root) cand.push_back(z.real());
  }
  std::sort(cand.begin(), cand.end());
  std::size_t i = 0;
  while (i < cand.size()) {
    std::size_t j = i + 1;
    double sum = cand[i];
    const double tol = 1e-5 * std::max(1.0, std::abs(cand[i]));
    while (j < cand.size() && cand[j] - cand[j - 1] <= tol) sum += cand[j++];
    const int m = static_cast<int>(j - i);
    const double x = polish(p, dp, sum / m, m);
    out.roots.push_back({x, m, backward_error(p, x)});
    i = j;
  }
  return out;
}

RootSet common_real_roots(const Poly& p1, const Poly& p2, const Poly& p3, const Poly& exclude,
                          const Settings& settings) {
  require_nonzero(p1);
  require_nonzero(p2);
  require_nonzero(p3);
  const Poly* ps[3] = {&p1, &p2, &p3};
  const Poly* lowest = *std::min_element(std::begin(ps), std::end(ps),
                                         [](const Poly* a, const Poly* b) { return a->degree() < b->degree(); });
  RootSet out;
  for (const auto& r : real_roots(*lowest, settings).roots) {
    bool common = true;
    for (const Poly* q : ps) common = common && backward_error(*q, r.value) < settings.tol_root;
    if (!common) continue;
    if (!exclude.is_zero() && backward_error(exclude, r.value) < settings.tol_root) continue;
    RealRoot rr = r;
    for (const Poly* q : ps) rr.residual = std::max(rr.residual, backward_error(*q, r.value));
    out.roots.push_back(rr);
  }
  return out;
}

double balancing_scale(const std::vector<Poly>& ps) {
  std::vector<double> mods;
  for (const auto& p : ps)
    if (p.degree() >= 1)
      for (auto z : complex_roots(p)) mods.push_back(std::abs(z));
  if (mods.empty()) return 1.0;
  const double top = *std::max_element(mods.begin(), mods.end());
  double logsum = 0.0;
  int count = 0;
  for (double m : mods)
    if (m > 1e-6 * top) {
      logsum += std::log(m);
      ++count;
    }
  return count == 0 ? 1.0 : pow2_round(std::exp(logsum / count));
}

double common_root_indicator(const Poly& p, const Poly& q, double scale) {
  require_nonzero(p);
  require_nonzero(q);
  const Poly ps = p.scaled_argument(scale), qs = q.scaled_argument(scale);
  // A constant has no roots, so it shares none.
  if (ps.degree() < 1 || qs.degree() < 1) return 1.0;
  auto one_side = [](const Poly& a, const Poly& b) {
    double best = std::numeric_limits<double>::infinity();
    for (auto z : complex_roots(a)) best = std::min(best, backward_error(b, z));
    return best;
  };
  return std::max(one_side(ps, qs), one_side(qs, ps));
}

}  // namespace mew
