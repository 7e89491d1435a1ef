#include "mew/geom.hpp"

#include <algorithm>
#include <cmath>

namespace mew {

LocalGeometry::LocalGeometry(Jet<double> u, int orientation)
    : orientation_(orientation),
      u_(std::move(u)),
      factor_(exp(u_ * 2.0)),
      inverse_factor_(exp(u_ * -2.0)) {
  const std::array<Jet<double>, 2> du{partial(u_, 0), partial(u_, 1)};
  const Jet<double> zero(du[0].order(), 0.0, u_.base());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        Jet<double> g = zero;
        if (a == b) g += du[c];
        if (a == c) g += du[b];
        if (b == c) g -= du[a];
        gamma_[a][b][c] = std::move(g);
      }
}

Jet<double> LocalGeometry::metric(int a, int b) const {
  return a == b ? factor_ : Jet<double>(factor_.order(), 0.0, factor_.base());
}

Jet<double> LocalGeometry::inverse_metric(int a, int b) const {
  return a == b ? inverse_factor_ : Jet<double>(inverse_factor_.order(), 0.0, inverse_factor_.base());
}

Jet<double> LocalGeometry::eps_lower(int a, int b) const {
  if (a == b) return Jet<double>(factor_.order(), 0.0, factor_.base());
  return factor_ * double(a < b ? orientation_ : -orientation_);
}

Jet<double> LocalGeometry::eps_upper(int a, int b) const {
  if (a == b) return Jet<double>(inverse_factor_.order(), 0.0, inverse_factor_.base());
  return inverse_factor_ * double(a < b ? orientation_ : -orientation_);
}

Jet<double> LocalGeometry::gauss_curvature() const {
  const Jet<double> lap = partial(partial(u_, 0), 0) + partial(partial(u_, 1), 1);
  return -(inverse_factor_ * lap);
}

// ---------------------------------------------------------------------------

namespace {

class ExpressionSource final : public StructureSource {
 public:
  ExpressionSource(Expr u, Expr p11, Expr p12, Expr p22)
      : u_(std::move(u)), p11_(std::move(p11)), p12_(std::move(p12)), p22_(std::move(p22)) {}

  StructureJets sample(Point p, int order) const override {
    return {u_.eval_jet(p, order), p11_.eval_jet(p, order), p12_.eval_jet(p, order), p22_.eval_jet(p, order)};
  }

  std::vector<std::pair<std::string, std::string>> describe() const override {
    return {{"u", u_.source()}, {"P11", p11_.source()}, {"P12", p12_.source()}, {"P22", p22_.source()}};
  }

 private:
  Expr u_, p11_, p12_, p22_;
};

class RescaledSource final : public StructureSource {
 public:
  RescaledSource(MoebiusStructure base, Expr omega) : base_(std::move(base)), omega_(std::move(omega)) {}

  StructureJets sample(Point p, int order) const override {
    const StructureJets b = base_.sample(p, order + 1);
    const LocalGeometry geom(b.u, base_.orientation());
    const Jet<double> w = omega_.eval_jet(p, order + 2);
    const std::array<Jet<double>, 2> ups{partial(w, 0), partial(w, 1)};
    const double half = 0.5;
    // g_ab Ups_c Ups^c = delta_ab |d omega|^2 for a conformally flat metric
    const Jet<double> ups_sq = ups[0] * ups[0] + ups[1] * ups[1];

    auto hess = [&](int a, int c) {
      Jet<double> h = partial(ups[c], a);
      for (int d = 0; d < 2; ++d) h -= geom.christoffel(d, a, c) * ups[d];
      return h;
    };
    auto rho = [&](const Jet<double>& pac, int a, int c) {
      Jet<double> out = pac - hess(a, c) + ups[a] * ups[c];
      if (a == c) out -= ups_sq * half;
      return out.truncated(order);
    };
    return {(b.u + w).truncated(order), rho(b.p11, 0, 0), rho(b.p12, 0, 1), rho(b.p22, 1, 1)};
  }

  std::vector<std::pair<std::string, std::string>> describe() const override {
    auto d = base_.describe();
    d.emplace_back("omega", omega_.source());
    return d;
  }

 private:
  MoebiusStructure base_;
  Expr omega_;
};

}  // namespace

MoebiusStructure::MoebiusStructure(Expr u, Expr p11, Expr p12, Expr p22, int orientation)
    : MoebiusStructure(std::make_shared<ExpressionSource>(std::move(u), std::move(p11), std::move(p12), std::move(p22)),
                       orientation) {}

MoebiusStructure::MoebiusStructure(std::shared_ptr<const StructureSource> source, int orientation)
    : source_(std::move(source)), orientation_(orientation >= 0 ? 1 : -1) {}

MoebiusStructure MoebiusStructure::with_orientation(int orientation) const {
  return MoebiusStructure(source_, orientation);
}

LocalStructure localize(const MoebiusStructure& s, Point p, int order) {
  StructureJets j = s.sample(p, order);
  LocalGeometry geom(std::move(j.u), s.orientation());
  auto rho = Tensor<double>::bilinear(j.p11, j.p12, j.p12, std::move(j.p22), 0);
  return {std::move(geom), std::move(rho)};
}

Christoffel christoffel(const MoebiusStructure& s, Point p, int order) {
  return LocalGeometry(s.sample(p, order).u, s.orientation()).christoffel_table();
}

Jet<double> gauss_curvature(const MoebiusStructure& s, Point p, int order) {
  return LocalGeometry(s.sample(p, order).u, s.orientation()).gauss_curvature();
}

MoebiusStructure conformal_rescale(const MoebiusStructure& s, Expr omega) {
  return MoebiusStructure(std::make_shared<RescaledSource>(s, std::move(omega)), s.orientation());
}

ValidationReport validate(const MoebiusStructure& s, const std::vector<Point>& samples, double tol) {
  ValidationReport report;
  for (const Point& p : samples) {
    const StructureJets j = s.sample(p, 2);
    const LocalGeometry geom(j.u, s.orientation());
    const double trace = geom.inverse_factor().value() * (j.p11.value() + j.p22.value());
    const double k = geom.gauss_curvature().value();
    const double pscale =
        geom.inverse_factor().value() *
        std::max({std::abs(j.p11.value()), std::abs(j.p12.value()), std::abs(j.p22.value())});
    const double scale = std::max({std::abs(k), pscale, 1.0});
    if (!(std::abs(trace - k) < tol * scale)) report.violations.push_back({p, trace, k, scale});
  }
  return report;
}

}  // namespace mew
