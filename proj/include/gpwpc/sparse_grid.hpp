#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "gpwpc/error.hpp"
#include "gpwpc/laguerre.hpp"
#include "gpwpc/multiindex.hpp"
#include "gpwpc/point.hpp"

namespace gpwpc {

/// Piecewise Lagrange interpolation I_m at the symmetric nodes y_{m;k}: on
/// each half-line the interpolant is the degree m-1 polynomial through the m
/// nodes of that side. y = 0 belongs to the positive side. I_0 v = v(0).
class UnivariateInterp {
public:
  UnivariateInterp(double a, int m);

  double a() const noexcept { return a_; }
  int level() const noexcept { return level_; }
  /// (k, y_{m;k}) in increasing k.
  const std::vector<std::pair<int, double>>& nodes() const noexcept { return nodes_; }
  double node(int k) const;
  /// Positive nodes y_{m;1} < ... < y_{m;m}.
  const std::vector<double>& positive_nodes() const noexcept { return positive_; }
  const GaussRule& rule() const noexcept { return rule_; }

  /// ℓ_{m;k}(y) for the m nodes on the side of y. Returns the side (+1 or -1);
  /// out[i] holds ℓ_{m; side·(i+1)}(y). For m = 0, out = {1} and side = 0.
  int side_values(double y, std::span<double> out) const;
  double lagrange(int k, double y) const;

private:
  double a_;
  int level_;
  GaussRule rule_;
  std::vector<std::pair<int, double>> nodes_;
  std::vector<double> positive_;
  std::vector<double> bary_;
};

/// Shared immutable instance per (a, m). Nodes are computed once, so equal
/// coordinates across grids are bit-identical.
const UnivariateInterp& cached_interp(double a, int m);

template <class T>
T interp_1d_eval(double a, int m, const std::map<int, T>& values, double y) {
  const UnivariateInterp& ip = cached_interp(a, m);
  auto at = [&](int k) -> const T& {
    auto it = values.find(k);
    if (it == values.end()) fail(ErrorKind::IncompleteData, "no value at node k = " + std::to_string(k));
    return it->second;
  };
  if (m == 0) return at(0);
  for (const auto& [k, x] : ip.nodes()) (void)at(k);
  std::vector<double> ell(static_cast<std::size_t>(m));
  const int side = ip.side_values(y, ell);
  T acc = 0.0 * at(side);
  for (int i = 0; i < m; ++i)
    if (ell[static_cast<std::size_t>(i)] != 0.0) acc += ell[static_cast<std::size_t>(i)] * at(side * (i + 1));
  return acc;
}

/// Δ_m f = I_m f - I_{m-1} f with I_{-1} = 0.
std::function<double(double)> delta_apply(double a, int m, std::function<double(double)> f);

/// One term (s, e, k) of the combination formula. k holds (j, k_j) for every
/// j in J_s; k_j = 0 where s_j - e_j = 0 (coordinate 0, ℓ ≡ 1).
struct GridAtom {
  MultiIndex s;
  MultiIndex e;
  std::vector<std::pair<int, int>> k;
  std::size_t point = 0;
  int sign = 1;

  int level(int dim) const { return s.get(dim) - e.get(dim); }
};

struct SparseGrid {
  double a = 1.0;
  IndexSet set;
  std::vector<GridAtom> atoms;
  /// Distinct points in first-appearance order over the atoms.
  std::vector<ParamPoint> points;
};

/// Enumerates all (s, e, k) with s ∈ Λ, e ∈ E_s, k ∈ P_{s,e}, deduplicating the
/// points by exact coordinate equality.
SparseGrid build_grid(const IndexSet& set, double a);

/// Σ_atoms sign · ∏_j ℓ_{s_j-e_j; k_j}(y_j) accumulated per distinct point, in
/// atom order.
std::vector<double> point_weights(const SparseGrid& grid, const ParamPoint& y);

/// I_Λ v with payloads v(point) aligned with grid.points.
template <class T>
class SparseInterpolant {
public:
  SparseInterpolant(std::shared_ptr<const SparseGrid> grid, std::vector<T> payloads)
      : grid_(std::move(grid)), payloads_(std::move(payloads)) {
    if (!grid_ || payloads_.size() != grid_->points.size())
      fail(ErrorKind::IncompleteData, "payloads do not cover every grid point");
  }

  const SparseGrid& grid() const noexcept { return *grid_; }
  const std::vector<T>& payloads() const noexcept { return payloads_; }

  T operator()(const ParamPoint& y) const {
    const std::vector<double> w = point_weights(*grid_, y);
    T acc = 0.0 * payloads_.front();
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != 0.0) acc += w[i] * payloads_[i];
    return acc;
  }

private:
  std::shared_ptr<const SparseGrid> grid_;
  std::vector<T> payloads_;
};

/// ω_{m;k} = ∫ ℓ_{m;k} dλ_a: half the Gauss weight of node |k| on each side;
/// the point mass {0 ↦ 1} for m = 0.
std::map<int, double> quad_weights_1d(double a, int m);

struct SparseQuadrature {
  std::vector<ParamPoint> points;
  std::vector<double> weights;

  double apply(const std::function<double(const ParamPoint&)>& f) const;
  template <class T>
  T apply_values(std::span<const T> values) const {
    if (values.size() != weights.size()) fail(ErrorKind::IncompleteData, "values do not match quadrature points");
    T acc = 0.0 * values.front();
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
    return acc;
  }
};

/// Q_Λ in point/weight form, one signed weight per distinct grid point.
SparseQuadrature sparse_quadrature(const SparseGrid& grid);
SparseQuadrature sparse_quadrature(const IndexSet& set, double a);

}  // namespace gpwpc
