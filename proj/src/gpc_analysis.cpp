#include "gpwpc/gpc_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <exception>
#include <string>

#include "gpwpc/batch_solve.hpp"
#include "gpwpc/error.hpp"
#include "gpwpc/sparse_grid.hpp"
#include "gpwpc/stats.hpp"

namespace gpwpc {

namespace {

double basis_factor(int sign, int s, double y, const LaguerreBasis& basis) {
  if (sign == 0) return y >= 0.0 ? 1.0 : -1.0;
  return eval_piecewise({sign, s}, y, basis);
}

// One factor of the tensor basis in a single dimension: s = 0 with no sign,
// or (sign, s) with s >= 1.
struct DimChoice {
  int sign = 0;
  int s = 0;
};

std::vector<DimChoice> dim_choices(int box_level) {
  std::vector<DimChoice> out{{0, 0}};
  for (int s = 1; s <= box_level; ++s) {
    out.push_back({-1, s});
    if (s == 1) out.push_back({0, 1});
    out.push_back({1, s});
  }
  return out;
}

std::size_t choice_position(int box_level, int sign, int s) {
  if (s == 0) return 0;
  // level 1 holds three choices, every higher level two
  std::size_t pos = 1;
  if (s > 1) pos += 3 + 2 * static_cast<std::size_t>(s - 2);
  if (s == 1) return pos + static_cast<std::size_t>(sign + 1);
  (void)box_level;
  return pos + (sign > 0 ? 1 : 0);
}

struct TensorRule {
  std::vector<std::vector<double>> nodes;    // per dimension
  std::vector<std::vector<double>> weights;  // per dimension
  std::size_t count = 1;
};

TensorRule tensor_rule(int dims, double a, const MultiIndex& box, int quad_margin, std::size_t cap) {
  if (quad_margin < 0) fail(ErrorKind::InvalidParameter, "quadrature margin must be non-negative");
  if (box.max_dim() > dims) fail(ErrorKind::InvalidParameter, "coefficient box exceeds the field dimension");
  TensorRule rule;
  for (int j = 1; j <= dims; ++j) {
    const int level = box.get(j) + quad_margin;
    const auto w = quad_weights_1d(a, level);
    std::vector<double> nodes, weights;
    for (const auto& [k, x] : cached_interp(a, level).nodes()) {
      nodes.push_back(x);
      weights.push_back(w.at(k));
    }
    rule.count *= nodes.size();
    if (rule.count > cap)
      fail(ErrorKind::BudgetExceeded, "tensor rule exceeds the point cap of " + std::to_string(cap));
    rule.nodes.push_back(std::move(nodes));
    rule.weights.push_back(std::move(weights));
  }
  return rule;
}

std::vector<ParamPoint> tensor_points(const TensorRule& rule) {
  const std::size_t dims = rule.nodes.size();
  std::vector<ParamPoint> pts;
  pts.reserve(rule.count);
  std::vector<std::size_t> pos(dims, 0);
  for (std::size_t n = 0; n < rule.count; ++n) {
    ParamPoint p;
    for (std::size_t j = 0; j < dims; ++j) p.set(static_cast<int>(j) + 1, rule.nodes[j][pos[j]]);
    pts.push_back(std::move(p));
    for (std::size_t j = dims; j-- > 0;) {
      if (++pos[j] < rule.nodes[j].size()) break;
      pos[j] = 0;
    }
  }
  return pts;
}

// Contracts data of shape [n_1, ..., n_J, width] (dimension 1 slowest) with
// per-dimension matrices B_j (c_j x n_j) into shape [c_1, ..., c_J, width].
std::vector<double> sum_factorize(std::vector<double> data, const std::vector<std::vector<std::vector<double>>>& mats,
                                  std::vector<std::size_t> shape, std::size_t width) {
  const std::size_t dims = shape.size();
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& B = mats[d];
    const std::size_t n = shape[d];
    const std::size_t c = B.size();
    std::size_t pre = 1, post = width;
    for (std::size_t i = 0; i < d; ++i) pre *= shape[i];
    for (std::size_t i = d + 1; i < dims; ++i) post *= shape[i];
    std::vector<double> out(pre * c * post, 0.0);
    const auto pre_i = static_cast<std::int64_t>(pre);
#pragma omp parallel for schedule(static)
    for (std::int64_t pi = 0; pi < pre_i; ++pi) {
      const auto p = static_cast<std::size_t>(pi);
      for (std::size_t ci = 0; ci < c; ++ci) {
        double* dst = &out[(p * c + ci) * post];
        for (std::size_t ni = 0; ni < n; ++ni) {
          const double b = B[ci][ni];
          if (b == 0.0) continue;
          const double* src = &data[(p * n + ni) * post];
          for (std::size_t k = 0; k < post; ++k) dst[k] += b * src[k];
        }
      }
    }
    data = std::move(out);
    shape[d] = c;
  }
  return data;
}

std::vector<std::vector<std::vector<double>>> basis_matrices(const TensorRule& rule, const MultiIndex& box,
                                                             const LaguerreBasis& basis) {
  std::vector<std::vector<std::vector<double>>> mats;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const auto choices = dim_choices(box.get(static_cast<int>(j) + 1));
    std::vector<std::vector<double>> B(choices.size(), std::vector<double>(rule.nodes[j].size()));
    for (std::size_t c = 0; c < choices.size(); ++c)
      for (std::size_t p = 0; p < rule.nodes[j].size(); ++p) {
        const double y = rule.nodes[j][p];
        const double phi = choices[c].s == 0 ? 1.0 : basis_factor(choices[c].sign, choices[c].s, y, basis);
        B[c][p] = rule.weights[j][p] * phi;
      }
    mats.push_back(std::move(B));
  }
  return mats;
}

std::vector<MultiIndex> box_indices(const MultiIndex& box) {
  std::vector<MultiIndex> out{MultiIndex{}};
  for (const auto& [d, l] : box.entries()) {
    std::vector<MultiIndex> next;
    for (const auto& s : out)
      for (int k = 0; k <= l; ++k) next.push_back(s.with(d, k));
    out = std::move(next);
  }
  std::sort(out.begin(), out.end(), graded_lex_less);
  return out;
}

// Offset of (δ, s) inside the contracted tensor [c_1, ..., c_J].
std::size_t coefficient_offset(const SignedMultiIndex& idx, const MultiIndex& box, int dims) {
  std::size_t offset = 0;
  for (int j = 1; j <= dims; ++j) {
    const int bj = box.get(j);
    const std::size_t extent = dim_choices(bj).size();
    const int s = idx.base().get(j);
    const std::size_t pos = s == 0 ? 0 : choice_position(bj, idx.sign(j), s);
    offset = offset * extent + pos;
  }
  return offset;
}

}  // namespace

double signed_basis_value(const SignedMultiIndex& index, const ParamPoint& y, const LaguerreBasis& basis) {
  double v = 1.0;
  const auto& e = index.base().entries();
  for (std::size_t i = 0; i < e.size(); ++i) {
    v *= basis_factor(index.signs()[i], e[i].second, y.get(e[i].first), basis);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double signed_basis_moment(const SignedMultiIndex& index) {
  // Per factor: ∫ L_{δ,s} dλ_a = 0 for s >= 1 and ∫ sgn dλ_a = 0.
  return index.base().is_zero() ? 1.0 : 0.0;
}

CoefficientTable::CoefficientTable(MultiIndex box, int quad_margin, double a, std::vector<CoefficientEntry> entries)
    : box_(std::move(box)), quad_margin_(quad_margin), a_(a), entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& idx = entries_[i].index;
    if (!covers(idx.base())) fail(ErrorKind::InvalidParameter, "coefficient outside the box");
    lookup_[idx] = i;
    const double n = v_norm(entries_[i].value);
    tilde_sq_[idx.base()] += n * n;
  }
}

const FemSolution* CoefficientTable::find(const SignedMultiIndex& index) const {
  auto it = lookup_.find(index);
  return it == lookup_.end() ? nullptr : &entries_[it->second].value;
}

std::vector<MultiIndex> CoefficientTable::indices() const { return box_indices(box_); }

double CoefficientTable::tilde_norm_sq(const MultiIndex& s) const {
  if (!covers(s)) fail(ErrorKind::IncompleteData, "index " + s.to_string() + " outside the coefficient box");
  auto it = tilde_sq_.find(s);
  return it == tilde_sq_.end() ? 0.0 : it->second;
}

double CoefficientTable::tilde_norm(const MultiIndex& s) const { return std::sqrt(tilde_norm_sq(s)); }

double CoefficientTable::total_norm_sq() const {
  double sum = 0.0;
  for (const auto& [s, v] : tilde_sq_) sum += v;
  return sum;
}

CoefficientTable compute_coefficients(const ParametricProblem& problem, const MultiIndex& box, int quad_margin,
                                      std::size_t point_cap) {
  const int dims = problem.field().dims;
  const double a = problem.field().measure.a;
  const TensorRule rule = tensor_rule(dims, a, box, quad_margin, point_cap);
  const std::vector<ParamPoint> pts = tensor_points(rule);
  const std::vector<FemSolution> sols = solve_batch(problem, pts);

  const std::size_t width = static_cast<std::size_t>(problem.mesh().unknowns());
  std::vector<double> data(pts.size() * width);
  for (std::size_t i = 0; i < sols.size(); ++i) std::copy(sols[i].values().begin(), sols[i].values().end(), &data[i * width]);

  const LaguerreBasis basis(a, std::max(box.linf(), 1));
  std::vector<std::size_t> shape;
  for (const auto& n : rule.nodes) shape.push_back(n.size());
  const auto coeffs = sum_factorize(std::move(data), basis_matrices(rule, box, basis), shape, width);

  std::vector<CoefficientEntry> entries;
  for (const MultiIndex& s : box_indices(box))
    for (const auto& idx : SignedMultiIndex::decorations(s)) {
      const std::size_t off = coefficient_offset(idx, box, dims) * width;
      std::vector<double> v(coeffs.begin() + static_cast<std::ptrdiff_t>(off),
                            coeffs.begin() + static_cast<std::ptrdiff_t>(off + width));
      entries.push_back({idx, FemSolution(problem.mesh().cells, std::move(v))});
    }
  return CoefficientTable(box, quad_margin, a, std::move(entries));
}

std::map<SignedMultiIndex, double> compute_scalar_coefficients(const std::function<double(const ParamPoint&)>& g,
                                                               int dims, double a, const MultiIndex& box,
                                                               int quad_margin) {
  const TensorRule rule = tensor_rule(dims, a, box, quad_margin, kDefaultTensorPointCap);
  const std::vector<ParamPoint> pts = tensor_points(rule);
  std::vector<double> data(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) data[i] = g(pts[i]);
  const LaguerreBasis basis(a, std::max(box.linf(), 1));
  std::vector<std::size_t> shape;
  for (const auto& n : rule.nodes) shape.push_back(n.size());
  const auto coeffs = sum_factorize(std::move(data), basis_matrices(rule, box, basis), shape, 1);
  std::map<SignedMultiIndex, double> out;
  for (const MultiIndex& s : box_indices(box))
    for (const auto& idx : SignedMultiIndex::decorations(s)) out[idx] = coeffs[coefficient_offset(idx, box, dims)];
  return out;
}

TruncatedExpansion::TruncatedExpansion(const CoefficientTable& table, const IndexSet& set)
    : basis_(table.a(), std::max(table.box().linf(), 1)), cells_(0) {
  for (const MultiIndex& s : set) {
    if (!table.covers(s))
      fail(ErrorKind::IncompleteData, "index " + s.to_string() + " lies outside the coefficient box");
    for (const auto& idx : SignedMultiIndex::decorations(s)) {
      const FemSolution* v = table.find(idx);
      if (!v) fail(ErrorKind::IncompleteData, "missing coefficient " + idx.to_string());
      terms_.push_back({idx, *v});
      cells_ = v->cells();
    }
  }
  if (terms_.empty() && !table.entries().empty()) cells_ = table.entries().front().value.cells();
}

FemSolution TruncatedExpansion::operator()(const ParamPoint& y) const {
  FemSolution acc(cells_);
  for (const auto& t : terms_) {
    const double phi = signed_basis_value(t.index, y, basis_);
    if (phi != 0.0) acc.axpy(phi, t.value);
  }
  return acc;
}

TruncatedExpansion truncate_S_Lambda(const CoefficientTable& table, const IndexSet& set) {
  return TruncatedExpansion(table, set);
}

std::vector<ParamPoint> sample_points(int dims, double a, RandomStream stream, std::size_t count) {
  if (dims < 1) fail(ErrorKind::InvalidParameter, "need at least one dimension");
  const MeasureParams params{a};
  params.validate();
  CounterRng rng(stream);
  std::vector<ParamPoint> pts(count);
  for (auto& p : pts)
    for (int j = 1; j <= dims; ++j) p.set(j, sample_laplace(params, rng));
  return pts;
}

McReference make_mc_reference(const ParametricProblem& problem, RandomStream stream, std::size_t count) {
  McReference ref;
  ref.points = sample_points(problem.field().dims, problem.field().measure.a, stream, count);
  ref.solutions = solve_batch(problem, ref.points);
  return ref;
}

namespace {

McEstimate mean_and_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  if (v.empty()) fail(ErrorKind::InsufficientData, "empty Monte-Carlo sample");
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

McEstimate mc_sq_error(const McReference& ref, const std::function<FemSolution(const ParamPoint&)>& approx) {
  const auto n = static_cast<std::int64_t>(ref.points.size());
  std::vector<double> sq(ref.points.size());
  std::vector<std::exception_ptr> errors(ref.points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const double e = v_norm(ref.solutions[k] - approx(ref.points[k]));
      sq[k] = e * e;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return mean_and_se(sq);
}

McEstimate mc_sq_norm(const McReference& ref) {
  std::vector<double> sq(ref.solutions.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double v = v_norm(ref.solutions[i]);
    sq[i] = v * v;
  }
  return mean_and_se(sq);
}

McEstimate sqrt_estimate(const McEstimate& sq) {
  const double v = std::sqrt(std::max(sq.value, 0.0));
  return {v, v > 0.0 ? sq.std_error / (2.0 * v) : std::sqrt(sq.std_error)};
}

namespace {

std::vector<std::pair<MultiIndex, double>> sorted_norms(const CoefficientTable& table) {
  std::vector<std::pair<MultiIndex, double>> out;
  for (const auto& s : table.indices()) out.emplace_back(s, table.tilde_norm(s));
  // indices() is graded lexicographic already; stable sort keeps it for ties
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  return out;
}

}  // namespace

SparsityReport sparsity_report(const CoefficientTable& table, std::span<const double> p_list,
                               const WeightConfig* weights, std::optional<double> mc_norm_sq) {
  if (table.entries().empty()) fail(ErrorKind::InsufficientData, "empty coefficient table");
  SparsityReport rep;
  rep.sorted = sorted_norms(table);
  for (double p : p_list) {
    if (!(p > 0.0)) fail(ErrorKind::InvalidParameter, "p must be positive");
    double sum = 0.0;
    for (const auto& [s, v] : rep.sorted) sum += std::pow(v, p);
    rep.lp_norms.emplace_back(p, std::pow(sum, 1.0 / p));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rep.sorted.size(); ++i)
    if (rep.sorted[i].second > 0.0) {
      lx.push_back(std::log(static_cast<double>(i + 1)));
      ly.push_back(std::log(rep.sorted[i].second));
    }
  if (lx.size() >= 2) {
    const LineFit f = fit_line(lx, ly);
    rep.decay_exponent = -f.slope;
    rep.fit_r2 = f.r2;
  }
  if (mc_norm_sq) rep.parseval_residual = *mc_norm_sq - table.total_norm_sq();
  if (weights) {
    double sum = 0.0;
    for (const auto& [s, v] : rep.sorted) {
      const double t = sigma(s, *weights) * v;
      sum += t * t;
    }
    rep.weighted_sum = sum;
  }
  return rep;
}

double parseval_tail_allowance(const CoefficientTable& table) {
  double tail = 0.0;
  for (const auto& [dim, top] : table.box().entries()) {
    double last = 0.0, prev = 0.0;
    for (const MultiIndex& s : table.indices()) {
      const int level = s.get(dim);
      if (level == top) last += table.tilde_norm_sq(s);
      else if (level == top - 1) prev += table.tilde_norm_sq(s);
    }
    if (last == 0.0) continue;
    if (!(prev > last)) return std::numeric_limits<double>::infinity();
    const double ratio = last / prev;
    tail += last * ratio / (1.0 - ratio);
  }
  return tail;
}

BestNTerm best_n_term(const CoefficientTable& table, std::size_t n) {
  if (n < 1) fail(ErrorKind::InvalidParameter, "n must be at least 1");
  const auto sorted = sorted_norms(table);
  BestNTerm out;
  double rest = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i < n)
      out.selected.push_back(sorted[i].first);
    else
      rest += sorted[i].second * sorted[i].second;
  }
  out.retained_error = std::sqrt(rest);
  return out;
}

}  // namespace gpwpc
