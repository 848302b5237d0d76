#include "gpwpc/sparse_grid.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "gpwpc/measures.hpp"

namespace gpwpc {

UnivariateInterp::UnivariateInterp(double a, int m) : a_(a), level_(m) {
  if (m < 0) fail(ErrorKind::InvalidParameter, "interpolation level must be non-negative");
  if (m == 0) {
    nodes_ = {{0, 0.0}};
    return;
  }
  rule_ = gauss_rule(a, m);
  nodes_ = symmetric_nodes(rule_);
  positive_ = rule_.nodes;
  // Barycentric weights 1/∏_{j≠k}(x_k - x_j), rescaled to unit maximum.
  bary_.assign(positive_.size(), 1.0);
  for (std::size_t k = 0; k < positive_.size(); ++k)
    for (std::size_t j = 0; j < positive_.size(); ++j)
      if (j != k) bary_[k] /= positive_[k] - positive_[j];
  double big = 0.0;
  for (double w : bary_) big = std::max(big, std::abs(w));
  for (double& w : bary_) w /= big;
}

double UnivariateInterp::node(int k) const {
  if (level_ == 0) {
    if (k != 0) fail(ErrorKind::InvalidParameter, "level 0 has the single node k = 0");
    return 0.0;
  }
  if (k == 0 || std::abs(k) > level_) fail(ErrorKind::InvalidParameter, "node index out of range");
  const double x = positive_[static_cast<std::size_t>(std::abs(k)) - 1];
  return k > 0 ? x : -x;
}

int UnivariateInterp::side_values(double y, std::span<double> out) const {
  if (level_ == 0) {
    out[0] = 1.0;
    return 0;
  }
  const int side = y >= 0.0 ? 1 : -1;
  const double t = std::abs(y);
  const std::size_t m = positive_.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (t == positive_[i]) {
      for (std::size_t j = 0; j < m; ++j) out[j] = j == i ? 1.0 : 0.0;
      return side;
    }
  }
  double denom = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = bary_[i] / (t - positive_[i]);
    denom += out[i];
  }
  for (std::size_t i = 0; i < m; ++i) out[i] /= denom;
  return side;
}

double UnivariateInterp::lagrange(int k, double y) const {
  if (level_ == 0) return k == 0 ? 1.0 : 0.0;
  if (k == 0 || std::abs(k) > level_) fail(ErrorKind::InvalidParameter, "node index out of range");
  std::vector<double> vals(static_cast<std::size_t>(level_));
  const int side = side_values(y, vals);
  if ((k > 0) != (side > 0)) return 0.0;
  return vals[static_cast<std::size_t>(std::abs(k)) - 1];
}

const UnivariateInterp& cached_interp(double a, int m) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, std::unique_ptr<UnivariateInterp>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{a, m}];
  if (!slot) slot = std::make_unique<UnivariateInterp>(a, m);
  return *slot;
}

std::function<double(double)> delta_apply(double a, int m, std::function<double(double)> f) {
  if (m < 0) fail(ErrorKind::InvalidParameter, "level must be non-negative");
  auto interp = [a](int level, const std::function<double(double)>& g) {
    std::map<int, double> values;
    for (const auto& [k, x] : cached_interp(a, level).nodes()) values[k] = g(x);
    return values;
  };
  auto fine = interp(m, f);
  if (m == 0) return [a, fine](double y) { return interp_1d_eval(a, 0, fine, y); };
  auto coarse = interp(m - 1, f);
  return [a, m, fine, coarse](double y) {
    return interp_1d_eval(a, m, fine, y) - interp_1d_eval(a, m - 1, coarse, y);
  };
}

SparseGrid build_grid(const IndexSet& set, double a) {
  MeasureParams{a}.validate();
  if (!set.is_downward_closed()) fail(ErrorKind::InvalidParameter, "grid construction needs a downward-closed set");
  SparseGrid grid;
  grid.a = a;
  grid.set = set;
  std::map<ParamPoint, std::size_t> index;

  for (const MultiIndex& s : set) {
    const auto& ent = s.entries();
    const std::size_t d = ent.size();
    for (std::size_t emask = 0; emask < (std::size_t{1} << d); ++emask) {
      MultiIndex e;
      std::vector<int> lev(d);
      for (std::size_t i = 0; i < d; ++i) {
        const int ej = static_cast<int>((emask >> (d - 1 - i)) & 1U);
        if (ej) e.set(ent[i].first, 1);
        lev[i] = ent[i].second - ej;
      }
      const int sign = (e.l1() % 2 == 0) ? 1 : -1;
      // Node choices per dimension: k = -m..-1, 1..m, or 0 at level 0.
      std::vector<const std::vector<std::pair<int, double>>*> choices(d);
      for (std::size_t i = 0; i < d; ++i) choices[i] = &cached_interp(a, lev[i]).nodes();
      std::vector<std::size_t> pos(d, 0);
      while (true) {
        GridAtom atom;
        atom.s = s;
        atom.e = e;
        atom.sign = sign;
        ParamPoint p;
        atom.k.reserve(d);
        for (std::size_t i = 0; i < d; ++i) {
          const auto& [k, x] = (*choices[i])[pos[i]];
          atom.k.emplace_back(ent[i].first, k);
          p.set(ent[i].first, x);
        }
        auto [it, inserted] = index.emplace(p, grid.points.size());
        if (inserted) grid.points.push_back(p);
        atom.point = it->second;
        grid.atoms.push_back(std::move(atom));

        std::size_t i = d;
        bool done = true;
        while (i > 0) {
          --i;
          if (++pos[i] < choices[i]->size()) {
            done = false;
            break;
          }
          pos[i] = 0;
        }
        if (done) break;
      }
    }
  }
  return grid;
}

std::vector<double> point_weights(const SparseGrid& grid, const ParamPoint& y) {
  // Lagrange values per (dim, level), computed on first use.
  struct Slot {
    bool ready = false;
    int side = 0;
    std::vector<double> values;
  };
  std::map<std::pair<int, int>, Slot> table;
  std::vector<double> w(grid.points.size(), 0.0);
  for (const GridAtom& atom : grid.atoms) {
    double prod = atom.sign;
    for (const auto& [dim, k] : atom.k) {
      if (k == 0) continue;
      const int lev = atom.level(dim);
      Slot& slot = table[{dim, lev}];
      if (!slot.ready) {
        slot.values.resize(static_cast<std::size_t>(lev));
        slot.side = cached_interp(grid.a, lev).side_values(y.get(dim), slot.values);
        slot.ready = true;
      }
      if ((k > 0) != (slot.side > 0)) {
        prod = 0.0;
        break;
      }
      prod *= slot.values[static_cast<std::size_t>(std::abs(k)) - 1];
    }
    if (prod != 0.0) w[atom.point] += prod;
  }
  return w;
}

std::map<int, double> quad_weights_1d(double a, int m) {
  if (m < 0) fail(ErrorKind::InvalidParameter, "level must be non-negative");
  if (m == 0) return {{0, 1.0}};
  const UnivariateInterp& ip = cached_interp(a, m);
  std::map<int, double> out;
  for (int k = 1; k <= m; ++k) {
    const double w = 0.5 * ip.rule().weights[static_cast<std::size_t>(k) - 1];
    out[k] = w;
    out[-k] = w;
  }
  return out;
}

double SparseQuadrature::apply(const std::function<double(const ParamPoint&)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) acc += weights[i] * f(points[i]);
  return acc;
}

SparseQuadrature sparse_quadrature(const SparseGrid& grid) {
  SparseQuadrature q;
  q.points = grid.points;
  q.weights.assign(grid.points.size(), 0.0);
  std::map<std::pair<int, int>, std::map<int, double>> omega;
  for (const GridAtom& atom : grid.atoms) {
    double prod = atom.sign;
    for (const auto& [dim, k] : atom.k) {
      if (k == 0) continue;
      const int lev = atom.level(dim);
      auto it = omega.find({dim, lev});
      if (it == omega.end()) it = omega.emplace(std::make_pair(dim, lev), quad_weights_1d(grid.a, lev)).first;
      prod *= it->second.at(k);
    }
    q.weights[atom.point] += prod;
  }
  return q;
}

SparseQuadrature sparse_quadrature(const IndexSet& set, double a) { return sparse_quadrature(build_grid(set, a)); }

}  // namespace gpwpc
