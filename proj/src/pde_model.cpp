#include "gpwpc/pde_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gpwpc/error.hpp"

namespace gpwpc {

void FieldSpec::validate() const {
  measure.validate();
  if (dims < 1) fail(ErrorKind::InvalidParameter, "field needs at least one parametric dimension");
  if (!(theta0 > 0.0) || !std::isfinite(theta0)) fail(ErrorKind::InvalidParameter, "theta0 must be positive");
  if (family == FieldFamily::Sine && !(tau > 1.0)) fail(ErrorKind::InvalidParameter, "tau must exceed 1");
  for (int d : frozen)
    if (d < 1) fail(ErrorKind::InvalidParameter, "frozen dimensions start at 1");
}

bool FieldSpec::is_frozen(int dim) const noexcept { return std::find(frozen.begin(), frozen.end(), dim) != frozen.end(); }

double FieldSpec::b_j(int dim) const {
  if (dim < 1 || dim > dims) fail(ErrorKind::InvalidParameter, "dimension outside the field");
  if (is_frozen(dim)) return 0.0;
  if (family == FieldFamily::AffineToy) return dim == 1 ? theta0 : 0.0;
  return theta0 * std::pow(static_cast<double>(dim), -tau);
}

std::vector<double> FieldSpec::b() const {
  std::vector<double> out(static_cast<std::size_t>(dims));
  for (int j = 1; j <= dims; ++j) out[static_cast<std::size_t>(j) - 1] = b_j(j);
  return out;
}

double FieldSpec::psi(int dim, double x) const {
  const double bj = b_j(dim);
  if (bj == 0.0) return 0.0;
  if (family == FieldFamily::AffineToy) return bj;
  return bj * std::sin(dim * std::numbers::pi * x);
}

void Mesh::validate() const {
  if (cells < 2) fail(ErrorKind::InvalidParameter, "mesh needs at least two cells");
}

FemSolution::FemSolution(int cells, std::vector<double> values) : cells_(cells), values_(std::move(values)) {
  if (cells < 2 || values_.size() != static_cast<std::size_t>(cells - 1))
    fail(ErrorKind::IncompleteData, "nodal vector does not match the mesh");
}

void FemSolution::check_same(const FemSolution& other) const {
  if (other.cells_ != cells_ || other.values_.size() != values_.size())
    fail(ErrorKind::IncompleteData, "FE functions live on different meshes");
}

FemSolution& FemSolution::operator+=(const FemSolution& other) {
  check_same(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

FemSolution& FemSolution::operator-=(const FemSolution& other) {
  check_same(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

FemSolution& FemSolution::operator*=(double alpha) {
  for (double& v : values_) v *= alpha;
  return *this;
}

FemSolution& FemSolution::axpy(double alpha, const FemSolution& other) {
  check_same(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * other.values_[i];
  return *this;
}

std::vector<double> Load::vector(const Mesh& mesh) const {
  const auto n = static_cast<std::size_t>(mesh.unknowns());
  std::vector<double> out(n);
  if (kind == Kind::Constant) {
    std::fill(out.begin(), out.end(), mesh.h() * constant);
  } else {
    if (nodal.size() != n) fail(ErrorKind::IncompleteData, "nodal load does not match the mesh");
    for (std::size_t i = 0; i < n; ++i) out[i] = mesh.h() * nodal[i];
  }
  return out;
}

namespace {

void check_support(const FieldSpec& spec, const ParamPoint& y) {
  if (y.max_dim() > spec.dims)
    fail(ErrorKind::InvalidParameter, "parameter support exceeds the field dimension " + std::to_string(spec.dims));
}

FieldValue field_from_sum(const FieldSpec& spec, const ParamPoint& y, double sum) {
  if (spec.family == FieldFamily::AffineToy) {
    // sum = θ0 y_1 here; a = (1 + x/2)(1 + sum) is applied by the caller.
    const double factor = 1.0 + sum;
    if (!(factor > 0.0) || !std::isfinite(factor))
      fail(ErrorKind::FieldOverflow, "affine coefficient not positive at y_1 = " + std::to_string(y.get(1)));
    return {std::log(factor), factor};
  }
  if (!(std::abs(sum) <= kExpGuard))
    fail(ErrorKind::FieldOverflow, "|b| = " + std::to_string(std::abs(sum)) + " exceeds the exp guard");
  return {sum, std::exp(sum)};
}

}  // namespace

FieldValue eval_field(const FieldSpec& spec, const ParamPoint& y, double x) {
  check_support(spec, y);
  double sum = 0.0;
  for (const auto& [d, v] : y.entries()) sum += v * spec.psi(d, x);
  FieldValue fv = field_from_sum(spec, y, sum);
  if (spec.family == FieldFamily::AffineToy) {
    fv.a *= 1.0 + 0.5 * x;
    fv.b = std::log(fv.a);
  }
  return fv;
}

double field_sup_norm(const FieldSpec& spec, const Mesh& mesh, const ParamPoint& y) {
  check_support(spec, y);
  double sup = 0.0;
  auto visit = [&](double x) {
    double sum = 0.0;
    for (const auto& [d, v] : y.entries()) sum += v * spec.psi(d, x);
    sup = std::max(sup, std::abs(sum));
  };
  for (int i = 1; i <= mesh.unknowns(); ++i) visit(mesh.node(i));
  for (int c = 1; c <= mesh.cells; ++c) visit(mesh.midpoint(c));
  return sup;
}

ParametricProblem::ParametricProblem(FieldSpec spec, Mesh mesh, Load load)
    : spec_(std::move(spec)), mesh_(mesh), load_(std::move(load)) {
  spec_.validate();
  mesh_.validate();
  rhs_ = load_.vector(mesh_);
  psi_mid_.resize(static_cast<std::size_t>(spec_.dims));
  psi_node_.resize(static_cast<std::size_t>(spec_.dims));
  for (int j = 1; j <= spec_.dims; ++j) {
    auto& mid = psi_mid_[static_cast<std::size_t>(j) - 1];
    auto& node = psi_node_[static_cast<std::size_t>(j) - 1];
    mid.resize(static_cast<std::size_t>(mesh_.cells));
    node.resize(static_cast<std::size_t>(mesh_.unknowns()));
    for (int c = 1; c <= mesh_.cells; ++c) mid[static_cast<std::size_t>(c) - 1] = spec_.psi(j, mesh_.midpoint(c));
    for (int i = 1; i <= mesh_.unknowns(); ++i) node[static_cast<std::size_t>(i) - 1] = spec_.psi(j, mesh_.node(i));
  }
}

void ParametricProblem::check_point(const ParamPoint& y) const { check_support(spec_, y); }

std::vector<double> ParametricProblem::coefficient(const ParamPoint& y) const {
  check_point(y);
  const auto nc = static_cast<std::size_t>(mesh_.cells);
  std::vector<double> sum(nc, 0.0);
  for (const auto& [d, v] : y.entries()) {
    const auto& psi = psi_mid_[static_cast<std::size_t>(d) - 1];
    for (std::size_t c = 0; c < nc; ++c) sum[c] += v * psi[c];
  }
  std::vector<double> a(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    FieldValue fv = field_from_sum(spec_, y, sum[c]);
    if (spec_.family == FieldFamily::AffineToy) fv.a *= 1.0 + 0.5 * mesh_.midpoint(static_cast<int>(c) + 1);
    a[c] = fv.a;
  }
  return a;
}

double ParametricProblem::sup_b(const ParamPoint& y) const { return field_sup_norm(spec_, mesh_, y); }

SolveResult ParametricProblem::solve_coefficient(std::span<const double> a_mid) const {
  const int n = mesh_.unknowns();
  const auto nu = static_cast<std::size_t>(n);
  if (a_mid.size() != static_cast<std::size_t>(mesh_.cells)) fail(ErrorKind::IncompleteData, "coefficient size");
  const double inv_h = 1.0 / mesh_.h();
  // Row i (node i+1) couples to cells i+1 and i+2 (a_mid[i], a_mid[i+1]).
  std::vector<double> diag(nu), upper(nu, 0.0);
  for (std::size_t i = 0; i < nu; ++i) {
    if (!(a_mid[i] > 0.0) || !std::isfinite(a_mid[i]))
      fail(ErrorKind::FieldOverflow, "non-finite or non-positive coefficient");
    diag[i] = (a_mid[i] + a_mid[i + 1]) * inv_h;
    if (i + 1 < nu) upper[i] = -a_mid[i + 1] * inv_h;
  }
  if (!(a_mid[nu] > 0.0) || !std::isfinite(a_mid[nu]))
    fail(ErrorKind::FieldOverflow, "non-finite or non-positive coefficient");

  // Thomas sweep. The pivot of row i is (g_i + a_{i+1})/h with g_i the harmonic
  // combination of a_i and g_{i-1}; forming it that way avoids the d - l*c cancellation
  // that kills the pivot once the coefficient contrast reaches ~1e16.
  std::vector<double> c_prime(nu), d_prime(nu);
  double g = a_mid[0];
  for (std::size_t i = 0; i < nu; ++i) {
    if (i > 0) g = 1.0 / (1.0 / a_mid[i] + 1.0 / g);  // no a*g product to overflow
    const double denom = (g + a_mid[i + 1]) * inv_h;
    if (!(denom > 0.0) || !std::isfinite(denom)) fail(ErrorKind::NumericalFailure, "tridiagonal pivot vanished");
    c_prime[i] = upper[i] / denom;
    d_prime[i] = (i > 0 ? rhs_[i] - upper[i - 1] * d_prime[i - 1] : rhs_[i]) / denom;
  }
  std::vector<double> u(nu);
  u[nu - 1] = d_prime[nu - 1];
  for (std::size_t i = nu - 1; i-- > 0;) u[i] = d_prime[i] - c_prime[i] * u[i + 1];

  double res2 = 0.0, rhs2 = 0.0;
  for (std::size_t i = 0; i < nu; ++i) {
    double r = diag[i] * u[i] - rhs_[i];
    if (i > 0) r += upper[i - 1] * u[i - 1];
    if (i + 1 < nu) r += upper[i] * u[i + 1];
    res2 += r * r;
    rhs2 += rhs_[i] * rhs_[i];
  }
  for (double v : u)
    if (!std::isfinite(v)) fail(ErrorKind::NumericalFailure, "non-finite FE solution");
  return {FemSolution(mesh_.cells, std::move(u)), rhs2 > 0.0 ? std::sqrt(res2 / rhs2) : std::sqrt(res2)};
}

SolveResult ParametricProblem::solve_with_residual(const ParamPoint& y) const {
  const auto a = coefficient(y);
  return solve_coefficient(a);
}

FemSolution ParametricProblem::solve(const ParamPoint& y) const { return solve_with_residual(y).u; }

double ParametricProblem::load_dual_norm() const {
  const std::vector<double> ones(static_cast<std::size_t>(mesh_.cells), 1.0);
  return v_norm(solve_coefficient(ones).u);
}

FemSolution solve(const FieldSpec& spec, const Mesh& mesh, const ParamPoint& y, const Load& load) {
  return ParametricProblem(spec, mesh, load).solve(y);
}

double v_inner(const FemSolution& u, const FemSolution& v) {
  if (u.cells() != v.cells() || u.size() != v.size()) fail(ErrorKind::IncompleteData, "FE functions on different meshes");
  const std::size_t n = u.size();
  if (n == 0) return 0.0;
  const double inv_h = static_cast<double>(u.cells());
  double sum = 0.0;
  double prev_u = 0.0, prev_v = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double cu = i < n ? u[i] : 0.0;
    const double cv = i < n ? v[i] : 0.0;
    sum += (cu - prev_u) * (cv - prev_v);
    prev_u = cu;
    prev_v = cv;
  }
  return sum * inv_h;
}

double v_norm(const FemSolution& u) { return std::sqrt(v_inner(u, u)); }

double apply_functional(const Functional& phi, const FemSolution& u) {
  const std::size_t n = u.size();
  const double h = u.cells() > 0 ? 1.0 / u.cells() : 0.0;
  switch (phi.kind) {
    case Functional::Kind::Mean: {
      // Composite trapezoid; boundary values vanish.
      double sum = 0.0;
      for (double v : u.values()) sum += v;
      return sum * h;
    }
    case Functional::Kind::PointEval: {
      if (!(phi.x0 >= 0.0 && phi.x0 <= 1.0)) fail(ErrorKind::InvalidParameter, "evaluation point outside [0, 1]");
      const double t = phi.x0 * u.cells();
      const auto cell = std::min(static_cast<std::size_t>(t), static_cast<std::size_t>(u.cells()) - 1);
      const double frac = t - static_cast<double>(cell);
      auto nodal = [&](std::size_t k) { return (k == 0 || k > n) ? 0.0 : u[k - 1]; };
      return (1.0 - frac) * nodal(cell) + frac * nodal(cell + 1);
    }
    case Functional::Kind::Dual: {
      if (phi.dual.size() != n) fail(ErrorKind::IncompleteData, "dual vector does not match the mesh");
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += phi.dual[i] * u[i];
      return sum;
    }
  }
  return 0.0;
}

namespace {

// Central stencils (offset, weight) for the k-th derivative at unit spacing.
std::vector<std::pair<int, double>> stencil(int order) {
  switch (order) {
    case 0: return {{0, 1.0}};
    case 1: return {{-1, -0.5}, {1, 0.5}};
    case 2: return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3: return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    default: fail(ErrorKind::InvalidParameter, "derivative order above 3");
  }
}

FemSolution fd_apply(const ParametricProblem& problem, const ParamPoint& y, const MultiIndex& s, double step) {
  const auto& e = s.entries();
  FemSolution acc(problem.mesh().cells);
  std::vector<std::vector<std::pair<int, double>>> st;
  for (const auto& [d, l] : e) st.push_back(stencil(l));
  std::vector<std::size_t> pos(e.size(), 0);
  const double scale = std::pow(step, -static_cast<double>(s.l1()));
  while (true) {
    ParamPoint p = y;
    double w = scale;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const auto [off, wt] = st[i][pos[i]];
      p.set(e[i].first, y.get(e[i].first) + off * step);
      w *= wt;
    }
    acc.axpy(w, problem.solve(p));
    std::size_t i = e.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++pos[i] < st[i].size()) {
        done = false;
        break;
      }
      pos[i] = 0;
    }
    if (done) break;
  }
  return acc;
}

}  // namespace

FdDerivative fd_parametric_derivative(const ParametricProblem& problem, const ParamPoint& y, const MultiIndex& s,
                                      double step) {
  if (!(step > 0.0)) fail(ErrorKind::InvalidParameter, "finite-difference step must be positive");
  if (s.l1() > 3) fail(ErrorKind::InvalidParameter, "|s|_1 must not exceed 3");
  if (s.max_dim() > problem.field().dims) fail(ErrorKind::InvalidParameter, "derivative dimension outside the field");
  if (s.is_zero()) return {problem.solve(y), 0.0};
  FemSolution coarse = fd_apply(problem, y, s, step);
  FemSolution fine = fd_apply(problem, y, s, 0.5 * step);
  const double est = v_norm(coarse - fine) * 4.0 / 3.0;
  return {std::move(coarse), est};
}

}  // namespace gpwpc
