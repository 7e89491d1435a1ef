#pragma once

// Möbius structures on a planar domain with a conformally flat representative
// metric g_ab = e^{2u} delta_ab, and the Levi-Civita calculus of that metric
// evaluated on jets at a base point.
//
// Conventions: eps_12 = orientation * e^{2u}, eps^12 = orientation * e^{-2u},
// so that eps^{ab} eps_{cb} = delta_c^a. Indices are raised and lowered with g.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mew/expr.hpp"
#include "mew/jet.hpp"

namespace mew {

enum class Slot : std::uint8_t { Down, Up };

/// A tensor at one base point whose components are jets. Components are
/// stored densely, 2^rank of them, with the first slot as the most
/// significant bit of the flat index.
template <typename Scalar>
class Tensor {
 public:
  using JetT = Jet<Scalar>;

  Tensor() : Tensor({}, 0, {JetT()}) {}

  Tensor(std::vector<Slot> slots, int weight, std::vector<JetT> components)
      : slots_(std::move(slots)), weight_(weight), comps_(std::move(components)) {
    assert(comps_.size() == (std::size_t{1} << slots_.size()));
  }

  static Tensor scalar(JetT f, int weight = 0) { return Tensor({}, weight, {std::move(f)}); }
  static Tensor form(JetT a, JetT b, int weight = 0) {
    return Tensor({Slot::Down}, weight, {std::move(a), std::move(b)});
  }
  static Tensor vector(JetT a, JetT b, int weight = 0) {
    return Tensor({Slot::Up}, weight, {std::move(a), std::move(b)});
  }
  static Tensor bilinear(JetT t11, JetT t12, JetT t21, JetT t22, int weight = 0) {
    return Tensor({Slot::Down, Slot::Down}, weight,
                  {std::move(t11), std::move(t12), std::move(t21), std::move(t22)});
  }

  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Slot>& slots() const { return slots_; }
  int covariant_rank() const { return static_cast<int>(std::count(slots_.begin(), slots_.end(), Slot::Down)); }
  int contravariant_rank() const { return rank() - covariant_rank(); }
  int weight() const { return weight_; }
  std::size_t size() const { return comps_.size(); }

  const JetT& operator[](std::size_t flat) const { return comps_[flat]; }
  JetT& operator[](std::size_t flat) { return comps_[flat]; }
  const JetT& at() const { return comps_[0]; }
  const JetT& at(int i) const { return comps_[i]; }
  const JetT& at(int i, int j) const { return comps_[2 * i + j]; }
  const JetT& at(int i, int j, int k) const { return comps_[4 * i + 2 * j + k]; }

  int order() const {
    int o = comps_.front().order();
    for (const auto& c : comps_) o = std::min(o, c.order());
    return o;
  }

  template <typename Other>
  Tensor<Other> cast() const {
    std::vector<Jet<Other>> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.template cast<Other>());
    return Tensor<Other>(slots_, weight_, std::move(out));
  }

 private:
  std::vector<Slot> slots_;
  int weight_ = 0;
  std::vector<JetT> comps_;
};

using Christoffel = std::array<std::array<std::array<Jet<double>, 2>, 2>, 2>;

/// Metric data of e^{2u} delta at one base point.
class LocalGeometry {
 public:
  LocalGeometry(Jet<double> u, int orientation = +1);

  int order() const { return u_.order(); }
  Point base() const { return {u_.base()[0], u_.base()[1]}; }
  int orientation() const { return orientation_; }

  const Jet<double>& log_factor() const { return u_; }
  /// e^{2u}
  const Jet<double>& factor() const { return factor_; }
  /// e^{-2u}
  const Jet<double>& inverse_factor() const { return inverse_factor_; }

  Jet<double> metric(int a, int b) const;
  Jet<double> inverse_metric(int a, int b) const;
  Jet<double> eps_lower(int a, int b) const;
  Jet<double> eps_upper(int a, int b) const;

  /// Gamma^a_bc
  const Jet<double>& christoffel(int a, int b, int c) const { return gamma_[a][b][c]; }
  const Christoffel& christoffel_table() const { return gamma_; }

  /// K = -e^{-2u} (u_xx + u_yy)
  Jet<double> gauss_curvature() const;

  /// Adds one covariant slot in front; output order is one less than the input.
  template <typename S>
  Tensor<S> covariant_derivative(const Tensor<S>& t) const;

  /// Metric contraction of two 1-forms, g^{ab} a_b b_b.
  template <typename S>
  Jet<S> dot(const Tensor<S>& a, const Tensor<S>& b) const;

  template <typename S>
  Tensor<S> raise(const Tensor<S>& form) const;
  template <typename S>
  Tensor<S> lower(const Tensor<S>& vec) const;

 private:
  int orientation_;
  Jet<double> u_;
  Jet<double> factor_;
  Jet<double> inverse_factor_;
  Christoffel gamma_;
};

/// Jets of the log conformal factor u and the Rho components at a base point.
struct StructureJets {
  Jet<double> u;
  Jet<double> p11;
  Jet<double> p12;
  Jet<double> p22;
};

class StructureSource {
 public:
  virtual ~StructureSource() = default;
  virtual StructureJets sample(Point p, int order) const = 0;
  /// Key/value echo of what defines the structure, for reports.
  virtual std::vector<std::pair<std::string, std::string>> describe() const = 0;
};

/// The problem instance: a representative metric e^{2u} delta and its Rho tensor.
/// Immutable; copies share the underlying source.
class MoebiusStructure {
 public:
  MoebiusStructure(Expr u, Expr p11, Expr p12, Expr p22, int orientation = +1);
  explicit MoebiusStructure(std::shared_ptr<const StructureSource> source, int orientation = +1);

  StructureJets sample(Point p, int order) const { return source_->sample(p, order); }
  int orientation() const { return orientation_; }
  MoebiusStructure with_orientation(int orientation) const;
  std::vector<std::pair<std::string, std::string>> describe() const { return source_->describe(); }

 private:
  std::shared_ptr<const StructureSource> source_;
  int orientation_;
};

/// Geometry plus the Rho tensor P_ab at one base point.
struct LocalStructure {
  LocalGeometry geometry;
  Tensor<double> rho;
};

LocalStructure localize(const MoebiusStructure& s, Point p, int order = kDefaultJetOrder);

Christoffel christoffel(const MoebiusStructure& s, Point p, int order = kDefaultJetOrder);
Jet<double> gauss_curvature(const MoebiusStructure& s, Point p, int order = kDefaultJetOrder);

/// Rescales g -> e^{2 omega} g; the Rho tensor follows
///   P'_ab = P_ab - grad_a Ups_b + Ups_a Ups_b - 1/2 g_ab Ups_c Ups^c,  Ups = d omega.
MoebiusStructure conformal_rescale(const MoebiusStructure& s, Expr omega);

struct TraceViolation {
  Point point;
  double trace = 0.0;      // g^{ab} P_ab
  double curvature = 0.0;  // K
  double scale = 0.0;
};

struct ValidationReport {
  std::vector<TraceViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks g^{ab}P_ab = K at each sample within tol * max(|K|, |P|, 1).
ValidationReport validate(const MoebiusStructure& s, const std::vector<Point>& samples, double tol = 1e-8);

// ---------------------------------------------------------------------------

template <typename S>
Tensor<S> LocalGeometry::covariant_derivative(const Tensor<S>& t) const {
  const int n = t.rank();
  std::vector<Slot> slots{Slot::Down};
  slots.insert(slots.end(), t.slots().begin(), t.slots().end());
  std::vector<Jet<S>> comps;
  comps.reserve(std::size_t{2} << n);
  for (int a = 0; a < 2; ++a) {
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      Jet<S> c = partial(t[flat], a);
      for (int k = 0; k < n; ++k) {
        const int bit = n - 1 - k;
        const int i = static_cast<int>((flat >> bit) & 1u);
        for (int d = 0; d < 2; ++d) {
          const std::size_t swapped = (flat & ~(std::size_t{1} << bit)) | (std::size_t(d) << bit);
          if (t.slots()[k] == Slot::Down)
            c -= gamma_[d][a][i].template cast<S>() * t[swapped];
          else
            c += gamma_[i][a][d].template cast<S>() * t[swapped];
        }
      }
      comps.push_back(std::move(c));
    }
  }
  return Tensor<S>(std::move(slots), t.weight(), std::move(comps));
}

template <typename S>
Jet<S> LocalGeometry::dot(const Tensor<S>& a, const Tensor<S>& b) const {
  return inverse_factor_.template cast<S>() * (a.at(0) * b.at(0) + a.at(1) * b.at(1));
}

template <typename S>
Tensor<S> LocalGeometry::raise(const Tensor<S>& form) const {
  assert(form.rank() == 1 && form.slots()[0] == Slot::Down);
  const auto f = inverse_factor_.template cast<S>();
  return Tensor<S>::vector(f * form.at(0), f * form.at(1), form.weight() - 2);
}

template <typename S>
Tensor<S> LocalGeometry::lower(const Tensor<S>& vec) const {
  assert(vec.rank() == 1 && vec.slots()[0] == Slot::Up);
  const auto f = factor_.template cast<S>();
  return Tensor<S>::form(f * vec.at(0), f * vec.at(1), vec.weight() + 2);
}

}  // namespace mew
