#include "mew/analyzer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "mew/errors.hpp"

namespace mew {

namespace {

using cd = std::complex<double>;

double safe_ratio(double num, double den) { return num / std::max(den, 1e-300); }

// Constraints at a point with the balancing scale used by every root and
// indicator computation.
struct NodeConstraints {
  Constraints c;
  double scale = 1.0;

  explicit NodeConstraints(const PointInvariants& inv, const Settings& st)
      : c(assemble(inv, st)), scale(balancing_scale({c.p1, c.p2, c.p3})) {}

  Poly scaled(const Poly& p) const { return p.scaled_argument(scale); }
};

struct SplitRoots {
  std::vector<double> admissible;  // P0(F) != 0
  std::vector<double> on_p0;       // common roots that are also roots of P0
};

SplitRoots common_roots(const NodeConstraints& n, const Settings& st) {
  SplitRoots out;
  const Poly p0 = n.scaled(n.c.p0);
  for (const auto& r : common_real_roots(n.scaled(n.c.p1), n.scaled(n.c.p2), n.scaled(n.c.p3), Poly{}, st).roots) {
    const bool excluded = !p0.is_zero() && backward_error(p0, r.value) < st.tol_root;
    (excluded ? out.on_p0 : out.admissible).push_back(r.value * n.scale);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residuals shared by closed-form and tracked candidates.

// grad_b alpha_a is da[b][a]; all quantities at the base point.
template <typename S>
struct PointField {
  S f;
  S alpha[2];
  S da[2][2];
};

template <typename S>
void fill_residuals(const LocalStructure& local, const PointField<S>& x, const std::optional<PointInvariants>& inv,
                    ResidualReport& rep) {
  const auto& g = local.geometry;
  const double gi = g.inverse_factor().value(), gf = g.factor().value();
  const S a2 = gi * (x.alpha[0] * x.alpha[0] + x.alpha[1] * x.alpha[1]);
  double e2 = 0.0, da2 = 0.0, p2 = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double pab = local.rho.at(a, b).value();
      const S rhs = 0.5 * g.eps_lower(a, b).value() * x.f + 0.5 * a2 * (a == b ? gf : 0.0) -
                    x.alpha[a] * x.alpha[b] - pab;
      e2 += std::norm(x.da[a][b] - rhs);
      da2 += std::norm(x.da[a][b]);
      p2 += pab * pab;
    }
  rep.f = x.f;
  rep.differential = gi * std::sqrt(e2);
  const double da_norm = gi * std::sqrt(da2), p_norm = gi * std::sqrt(p2);
  const double alpha_norm2 = std::abs(a2);
  const double k = g.gauss_curvature().value();
  rep.trace = std::abs(gi * (x.da[0][0] + x.da[1][1]) + k);
  rep.relative = std::max(safe_ratio(rep.differential, da_norm + std::abs(x.f) + alpha_norm2 + p_norm),
                          safe_ratio(rep.trace, da_norm + std::abs(k)));
  if (!inv) return;
  auto dot = [&](const Vec2& v) { return gi * (x.alpha[0] * v[0] + x.alpha[1] * v[1]); };
  auto norm = [&](const Vec2& v) { return std::sqrt(inv->dot(v, v)); };
  const double alpha_norm = std::sqrt(alpha_norm2);
  const S f2 = x.f * x.f;
  rep.constraint_u = std::abs(dot(inv->u) + f2 + inv->phi);
  const S ay = dot(inv->y);
  rep.constraint_w = std::abs(dot(inv->w) - inv->ell - 2.5 * inv->rho * x.f - (3 * inv->mu + 3.0 * ay) * f2);
  const double su = alpha_norm * norm(inv->u) + std::abs(f2) + std::abs(inv->phi);
  const double sw = alpha_norm * norm(inv->w) + std::abs(inv->ell) + 2.5 * inv->rho * std::abs(x.f) +
                    (3 * std::abs(inv->mu) + 3 * alpha_norm * norm(inv->y)) * std::abs(f2);
  rep.relative = std::max({rep.relative, safe_ratio(*rep.constraint_u, su), safe_ratio(*rep.constraint_w, sw)});
}

std::optional<PointInvariants> invariants_if_curved(const MoebiusStructure& s, Point p, const Settings& st) {
  try {
    return compute_invariants(s, p, st);
  } catch (const FlatPoint&) {
    return std::nullopt;
  }
}

template <typename S>
ResidualReport closed_form_impl(const MoebiusStructure& s, const std::array<Jet<S>, 2>& alpha, Point p,
                                const Settings& st) {
  const LocalStructure local = localize(s, p, st.jet_order);
  const auto& g = local.geometry;
  PointField<S> x;
  for (int a = 0; a < 2; ++a) x.alpha[a] = alpha[a].value();
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) {
      S v = partial(alpha[a], b).value();
      for (int d = 0; d < 2; ++d) v -= g.christoffel(d, b, a).value() * x.alpha[d];
      x.da[b][a] = v;
    }
  x.f = S(0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) x.f += g.eps_upper(a, b).value() * x.da[a][b];
  ResidualReport rep;
  fill_residuals(local, x, invariants_if_curved(s, p, st), rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Field reconstruction on the tracking grid.

constexpr int kHalf = 2;  // 5x5 grid

struct NodeValue {
  double f = 0.0;
  Vec2 alpha{};
};

int sgn(int v) { return (v > 0) - (v < 0); }

NodeValue track_alpha1(const MoebiusStructure& s, Point q, double previous, const Settings& st) {
  const PointInvariants inv = compute_invariants(s, q, st);
  const NodeConstraints n(inv, st);
  auto roots = common_roots(n, st).admissible;
  if (roots.empty()) throw GridTrackingFailed("no admissible common root near the candidate");
  std::sort(roots.begin(), roots.end(),
            [&](double a, double b) { return std::abs(a - previous) < std::abs(b - previous); });
  const double d1 = std::abs(roots[0] - previous);
  if (d1 > 0.1 * (1.0 + std::abs(previous)))
    throw GridTrackingFailed("root branch jumps between neighboring grid nodes");
  if (roots.size() > 1 && d1 > 0.25 * std::abs(roots[1] - previous))
    throw GridTrackingFailed("root collision on the tracking grid");
  return {roots[0], alpha_from_F(inv, roots[0], st).alpha};
}

NodeValue mzero_node(const MoebiusStructure& s, Point q, const Settings& st) {
  const InvariantFields f = invariant_fields(s, q, st);
  const MTensor m = compute_m(f, st);
  return {f_from_P0_branch(point_invariants(f), st).f, m.alpha};
}

}  // namespace

std::string_view to_string(VerdictTag tag) {
  switch (tag) {
    case VerdictTag::Flat: return "Flat";
    case VerdictTag::MZeroAdmits: return "MZeroAdmits";
    case VerdictTag::Obstructed: return "Obstructed";
    case VerdictTag::AdmitsRealCandidate: return "AdmitsRealCandidate";
    case VerdictTag::VanishingObstructionsNoRealSolution: return "VanishingObstructionsNoRealSolution";
    case VerdictTag::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(CandidateSource source) {
  switch (source) {
    case CandidateSource::Alpha1Formula: return "Alpha1Formula";
    case CandidateSource::MZeroFormula: return "MZeroFormula";
    case CandidateSource::UserSupplied: return "UserSupplied";
  }
  return "UserSupplied";
}

double ResidualReport::max_abs() const {
  double m = std::max(differential, trace);
  for (const auto& v : {constraint_u, constraint_w, gradient_f})
    if (v) m = std::max(m, *v);
  return m;
}

std::vector<double> Verdict::verified_f() const {
  std::vector<double> out;
  for (const auto& c : candidates)
    if (c.verified) out.push_back(c.candidate.f);
  return out;
}

SolutionCandidate alpha_from_F(const PointInvariants& inv, double f, const Settings& settings) {
  const double p0 = inv.sigma - 3 * inv.rho * f * f;
  if (std::abs(p0) <= settings.tol_p0 * (std::abs(inv.sigma) + 3 * inv.rho * f * f))
    throw P0Vanishes("sigma - 3 rho F^2 vanishes; use the M_ab branch");
  SolutionCandidate c;
  c.f = f;
  c.source = CandidateSource::Alpha1Formula;
  for (int a = 0; a < 2; ++a)
    c.alpha[a] = (inv.l[a] + 2.5 * inv.rho * f * inv.y[a] + 0.5 * f * f * inv.grad_rho[a] +
                  3 * std::pow(f, 4) * inv.u[a]) /
                 p0;
  return c;
}

P0Branch f_from_P0_branch(const PointInvariants& inv, const Settings& settings) {
  P0Branch b;
  const double r = inv.rho;
  b.f = -0.4 * (r * inv.ell + inv.mu * inv.sigma + inv.tau * inv.sigma / (3 * r) + inv.tau * inv.phi) / (r * r);
  const double target = inv.sigma / (3 * r);
  const double den = b.f * b.f + std::abs(target);
  b.mismatch = den == 0.0 ? 0.0 : std::abs(b.f * b.f - target) / den;
  b.consistent = inv.sigma > 0 && b.mismatch <= settings.tol_p0;
  return b;
}

ResidualReport verify_closed_form(const MoebiusStructure& s, const AlphaExpressions& alpha, Point p, Mode mode,
                                  const Settings& settings) {
  const int order = settings.jet_order;
  if (mode == Mode::Real)
    return closed_form_impl<double>(s, {alpha.re[0].eval_jet(p, order), alpha.re[1].eval_jet(p, order)}, p,
                                    settings);
  std::array<Jet<cd>, 2> a;
  for (int i = 0; i < 2; ++i)
    a[i] = alpha.re[i].eval_jet(p, order).cast<cd>() + alpha.im[i].eval_jet(p, order).cast<cd>() * cd(0, 1);
  return closed_form_impl<cd>(s, a, p, settings);
}

ResidualReport verify_candidate(const MoebiusStructure& s, const SolutionCandidate& cand, Point p,
                                const Settings& settings) {
  const double h = settings.tracking_step;
  constexpr int n = 2 * kHalf + 1;
  std::array<std::array<NodeValue, n>, n> grid;
  std::vector<std::pair<int, int>> order;
  for (int i = -kHalf; i <= kHalf; ++i)
    for (int j = -kHalf; j <= kHalf; ++j) order.emplace_back(i, j);
  std::stable_sort(order.begin(), order.end(), [](auto a, auto b) {
    return std::abs(a.first) + std::abs(a.second) < std::abs(b.first) + std::abs(b.second);
  });
  for (auto [i, j] : order) {
    const Point q{p.x + i * h, p.y + j * h};
    NodeValue& node = grid[i + kHalf][j + kHalf];
    if (cand.source == CandidateSource::MZeroFormula) {
      node = mzero_node(s, q, settings);
      continue;
    }
    double previous = cand.f;
    if (i != 0 || j != 0) {
      const bool step_x = std::abs(i) >= std::abs(j);
      const int pi = step_x ? i - sgn(i) : i, pj = step_x ? j : j - sgn(j);
      previous = grid[pi + kHalf][pj + kHalf].f;
    }
    node = track_alpha1(s, q, previous, settings);
  }

  auto d = [&](auto value, int axis) {
    auto at = [&](int k) { return axis == 0 ? value(grid[kHalf + k][kHalf]) : value(grid[kHalf][kHalf + k]); };
    return (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * h);
  };
  const LocalStructure local = localize(s, p, settings.jet_order);
  const auto& g = local.geometry;
  const NodeValue& c = grid[kHalf][kHalf];
  PointField<double> x;
  x.f = c.f;
  x.alpha[0] = c.alpha[0];
  x.alpha[1] = c.alpha[1];
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) {
      double v = d([a](const NodeValue& nv) { return nv.alpha[a]; }, b);
      for (int e = 0; e < 2; ++e) v -= g.christoffel(e, b, a).value() * x.alpha[e];
      x.da[b][a] = v;
    }
  const auto inv = invariants_if_curved(s, p, settings);
  ResidualReport rep;
  fill_residuals(local, x, inv, rep);
  if (inv) {
    // Cross-check of the tracked F against grad F = -2 alpha F - Y.
    const double gi = g.inverse_factor().value();
    double e2 = 0.0, af2 = 0.0, y2 = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double df = d([](const NodeValue& nv) { return nv.f; }, a);
      const double rhs = -2 * x.alpha[a] * x.f - inv->y[a];
      e2 += (df - rhs) * (df - rhs);
      af2 += 4 * x.alpha[a] * x.alpha[a] * x.f * x.f;
      y2 += inv->y[a] * inv->y[a];
    }
    rep.gradient_f = std::sqrt(gi * e2);
    rep.relative = std::max(rep.relative, safe_ratio(std::sqrt(e2), std::sqrt(af2) + std::sqrt(y2)));
  }
  return rep;
}

std::vector<cd> common_complex_roots(const Poly& p1, const Poly& p2, const Poly& p3, const Poly& exclude,
                                     const Settings& settings) {
  const Poly* ps[3] = {&p1, &p2, &p3};
  const Poly* lowest = *std::min_element(std::begin(ps), std::end(ps),
                                         [](const Poly* a, const Poly* b) { return a->degree() < b->degree(); });
  std::vector<cd> out;
  if (lowest->degree() < 1) return out;
  for (cd z : complex_roots(*lowest)) {
    bool common = true;
    for (const Poly* q : ps) common = common && backward_error(*q, z) < settings.tol_root;
    if (!common) continue;
    if (!exclude.is_zero() && backward_error(exclude, z) < settings.tol_root) continue;
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](cd w) { return std::abs(w - z) <= 1e-6 * std::max(1.0, std::abs(z)); });
    if (!dup) out.push_back(z);
  }
  std::sort(out.begin(), out.end(),
            [](cd a, cd b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return out;
}

Verdict classify_point(const MoebiusStructure& s, Point p, const Settings& settings) {
  Verdict v;
  v.point = p;
  try {
    std::optional<InvariantFields> fields;
    try {
      fields.emplace(invariant_fields(s, p, settings));
    } catch (const FlatPoint&) {
      v.tag = VerdictTag::Flat;
      v.note = "Y vanishes: the equation reduces to the conformally Einstein equation";
      return v;
    }
    const PointInvariants inv = point_invariants(*fields);

    // M_ab = 0 branch; only reachable for sigma > 0.
    if (!sigma_vanishes(*fields, settings) && inv.sigma > 0) {
      const MTensor m = compute_m(*fields, settings);
      v.m_norm = m.relative_norm();
      if (*v.m_norm < settings.tol_m) {
        v.tag = VerdictTag::MZeroAdmits;
        CandidateResult cr;
        cr.candidate = {f_from_P0_branch(inv, settings).f, m.alpha, CandidateSource::MZeroFormula};
        try {
          cr.residuals = verify_candidate(s, cr.candidate, p, settings);
          cr.verified = cr.residuals->relative < settings.tol_residual;
        } catch (const Error& e) {
          cr.note = e.what();
        }
        v.candidates.push_back(std::move(cr));
        v.note = "M_ab vanishes: alpha from the M_ab formula solves the equation";
        return v;
      }
    }

    const NodeConstraints n(inv, settings);
    const Constraints& c = n.c;
    v.resultants = {sylvester_resultant(c.p1, c.p2).value(), sylvester_resultant(c.p1, c.p3).value(),
                    sylvester_resultant(c.p2, c.p3).value()};
    v.indicators = {common_root_indicator(c.p1, c.p2, n.scale), common_root_indicator(c.p1, c.p3, n.scale),
                    common_root_indicator(c.p2, c.p3, n.scale)};
    const double top = std::max({(*v.indicators)[0], (*v.indicators)[1], (*v.indicators)[2]});
    if (top > settings.tol_res_high) {
      v.tag = VerdictTag::Obstructed;
      v.note = "a resultant obstruction is nonzero";
      return v;
    }
    if (top >= settings.tol_res_low) {
      v.tag = VerdictTag::Inconclusive;
      v.note = "resultant indicator between the vanishing and nonzero thresholds";
      return v;
    }

    const SplitRoots roots = common_roots(n, settings);
    for (cd z : common_complex_roots(n.scaled(c.p1), n.scaled(c.p2), n.scaled(c.p3), n.scaled(c.p0), settings))
      if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) v.complex_candidates.push_back(z * n.scale);
    bool any_verified = false;
    for (double f : roots.admissible) {
      CandidateResult cr;
      cr.candidate.f = f;
      try {
        cr.candidate = alpha_from_F(inv, f, settings);
        cr.residuals = verify_candidate(s, cr.candidate, p, settings);
        cr.verified = cr.residuals->relative < settings.tol_residual;
      } catch (const Error& e) {
        cr.note = e.what();
      }
      any_verified = any_verified || cr.verified;
      v.candidates.push_back(std::move(cr));
    }
    if (any_verified) {
      v.tag = VerdictTag::AdmitsRealCandidate;
      v.note = "a common real root reconstructs a verified solution";
    } else if (!roots.on_p0.empty()) {
      v.tag = VerdictTag::Inconclusive;
      v.note = "a common root lies on the P0 = 0 branch boundary";
    } else {
      v.tag = VerdictTag::VanishingObstructionsNoRealSolution;
      v.note = roots.admissible.empty() ? "obstructions vanish but the common roots are not real"
                                        : "obstructions vanish but no real candidate verifies";
    }
  } catch (const Error& e) {
    v = Verdict{};
    v.point = p;
    v.tag = VerdictTag::Inconclusive;
    v.note = e.what();
  }
  return v;
}

std::vector<Point> GridSpec::nodes() const {
  std::vector<Point> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out.push_back({nx == 1 ? xmin : xmin + (xmax - xmin) * i / (nx - 1),
                     ny == 1 ? ymin : ymin + (ymax - ymin) * j / (ny - 1)});
  return out;
}

namespace {

std::string format_f(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", f);
  return buf;
}

// "F = ±2" when the verified values come in sign pairs, else a short list.
std::string describe_f(const std::vector<Verdict>& nodes) {
  std::vector<double> vals;
  for (const auto& v : nodes)
    for (double f : v.verified_f())
      if (std::none_of(vals.begin(), vals.end(),
                       [&](double w) { return std::abs(w - f) <= 1e-6 * std::max(1.0, std::abs(f)); }))
        vals.push_back(f);
  std::sort(vals.begin(), vals.end());
  if (vals.empty()) return "";
  if (vals.size() > 4) return "F varies";
  const bool paired = vals.size() == 2 && std::abs(vals[0] + vals[1]) <= 1e-6 * std::max(1.0, std::abs(vals[1]));
  if (paired) return "F = ±" + format_f(vals[1]);
  std::string s = "F = ";
  for (std::size_t i = 0; i < vals.size(); ++i) s += (i ? ", " : "") + format_f(vals[i]);
  return s;
}

void summarize(RegionReport& r) {
  int nonflat = 0, inconclusive = 0;
  for (const auto& v : r.nodes) {
    ++r.histogram[v.tag];
    nonflat += v.tag != VerdictTag::Flat;
    inconclusive += v.tag == VerdictTag::Inconclusive;
  }
  if (nonflat == 0) {
    r.summary = "FLAT";
    r.detail = "Flat on 100.0% of nodes";
    return;
  }
  VerdictTag top = VerdictTag::Inconclusive;
  int top_count = 0, decided_tags = 0;
  for (auto [tag, count] : r.histogram) {
    if (tag == VerdictTag::Flat || tag == VerdictTag::Inconclusive) continue;
    ++decided_tags;
    if (count > top_count) {
      top = tag;
      top_count = count;
    }
  }
  char buf[160];
  if (decided_tags == 0) {
    r.summary = "INCONCLUSIVE";
    std::snprintf(buf, sizeof buf, "Inconclusive on 100.0%% of non-flat nodes");
    r.detail = buf;
    return;
  }
  std::snprintf(buf, sizeof buf, "%s on %.1f%% of non-flat nodes", std::string(to_string(top)).c_str(),
                100.0 * top_count / nonflat);
  r.detail = buf;
  if (inconclusive > 0) r.detail += ", " + std::to_string(inconclusive) + " inconclusive";
  if (decided_tags > 1) {
    r.summary = "MIXED";
    return;
  }
  switch (top) {
    case VerdictTag::Obstructed: r.summary = "OBSTRUCTED"; break;
    case VerdictTag::AdmitsRealCandidate: r.summary = "ADMITS (" + describe_f(r.nodes) + ")"; break;
    case VerdictTag::VanishingObstructionsNoRealSolution: r.summary = "NO REAL SOLUTION"; break;
    case VerdictTag::MZeroAdmits: r.summary = "ADMITS (M = 0)"; break;
    default: r.summary = "MIXED"; break;
  }
}

}  // namespace

RegionReport scan_points(const MoebiusStructure& s, const std::vector<Point>& points, const Settings& settings) {
  RegionReport r;
  r.nodes.resize(points.size());
  unsigned workers = settings.threads ? settings.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(points.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) r.nodes[i] = classify_point(s, points[i], settings);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  summarize(r);
  return r;
}

RegionReport scan_region(const MoebiusStructure& s, const GridSpec& grid, const Settings& settings) {
  if (grid.nx < 2 || grid.ny < 2) throw ConfigError("region scans need at least a 2x2 grid");
  RegionReport r = scan_points(s, grid.nodes(), settings);
  r.grid = grid;
  return r;
}

}  // namespace mew
