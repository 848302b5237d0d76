#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gpwpc/measures.hpp"
#include "gpwpc/multiindex.hpp"
#include "gpwpc/point.hpp"

namespace gpwpc {

enum class FieldFamily {
  Sine,       ///< b(x, y) = Σ_j y_j θ0 j^{-τ} sin(jπx), a = exp(b)
  AffineToy,  ///< a(x, y) = (1 + x/2)(1 + θ0 y_1): linear in y_1, for derivative checks
};

/// Random coefficient field on D = (0, 1).
struct FieldSpec {
  int dims = 4;
  double theta0 = 0.6;
  double tau = 3.0;
  MeasureParams measure;
  FieldFamily family = FieldFamily::Sine;
  /// Dimensions whose ψ_j is replaced by zero.
  std::vector<int> frozen;

  void validate() const;
  bool is_frozen(int dim) const noexcept;
  /// b_j = ‖ψ_j‖_∞ (zero for frozen dimensions).
  double b_j(int dim) const;
  std::vector<double> b() const;
  double psi(int dim, double x) const;
};

struct Mesh {
  int cells = 64;

  void validate() const;
  double h() const noexcept { return 1.0 / cells; }
  int unknowns() const noexcept { return cells - 1; }
  /// Interior node i = 1..cells-1.
  double node(int i) const noexcept { return i * h(); }
  /// Midpoint of cell c = 1..cells, which spans [node(c-1), node(c)].
  double midpoint(int c) const noexcept { return (c - 0.5) * h(); }
};

/// Nodal values of a P1 function in V = H¹₀(0, 1) at the interior nodes.
class FemSolution {
public:
  FemSolution() = default;
  explicit FemSolution(int cells) : cells_(cells), values_(static_cast<std::size_t>(cells > 1 ? cells - 1 : 0), 0.0) {}
  FemSolution(int cells, std::vector<double> values);

  int cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  FemSolution& operator+=(const FemSolution& other);
  FemSolution& operator-=(const FemSolution& other);
  FemSolution& operator*=(double alpha);
  /// this += alpha * other
  FemSolution& axpy(double alpha, const FemSolution& other);

  friend FemSolution operator+(FemSolution lhs, const FemSolution& rhs) { return lhs += rhs; }
  friend FemSolution operator-(FemSolution lhs, const FemSolution& rhs) { return lhs -= rhs; }
  friend FemSolution operator*(double alpha, FemSolution v) { return v *= alpha; }
  friend FemSolution operator*(FemSolution v, double alpha) { return v *= alpha; }
  friend bool operator==(const FemSolution&, const FemSolution&) = default;

private:
  void check_same(const FemSolution& other) const;

  int cells_ = 0;
  std::vector<double> values_;
};

/// Right-hand side f: a constant or nodal values at interior nodes. The load
/// vector is lumped, F_i = h f(x_i).
struct Load {
  enum class Kind { Constant, Nodal };
  Kind kind = Kind::Constant;
  double constant = 1.0;
  std::vector<double> nodal;

  static Load constant_load(double c = 1.0) { return {Kind::Constant, c, {}}; }
  static Load nodal_load(std::vector<double> v) { return {Kind::Nodal, 0.0, std::move(v)}; }
  std::vector<double> vector(const Mesh& mesh) const;
};

struct Functional {
  enum class Kind { Mean, PointEval, Dual };
  Kind kind = Kind::Mean;
  double x0 = 0.5;
  std::vector<double> dual;

  static Functional mean() { return {Kind::Mean, 0.5, {}}; }
  static Functional point_eval(double x0) { return {Kind::PointEval, x0, {}}; }
  static Functional dual_vector(std::vector<double> v) { return {Kind::Dual, 0.0, std::move(v)}; }
};

struct FieldValue {
  double b = 0.0;
  double a = 1.0;
};

inline constexpr double kExpGuard = 700.0;

/// b(x, y) and a(x, y); throws FieldOverflow when |b| > 700 or a is not
/// positive and finite.
FieldValue eval_field(const FieldSpec& spec, const ParamPoint& y, double x);

/// max |b(x, y)| over interior nodes and cell midpoints.
double field_sup_norm(const FieldSpec& spec, const Mesh& mesh, const ParamPoint& y);

struct SolveResult {
  FemSolution u;
  /// ‖K u - F‖_2 / ‖F‖_2 of the assembled system.
  double relative_residual = 0.0;
};

/// Field, mesh and load bundled with ψ_j tabulated at midpoints and nodes, so
/// that repeated solves only pay for exp and the tridiagonal sweep.
class ParametricProblem {
public:
  ParametricProblem(FieldSpec spec, Mesh mesh, Load load = Load::constant_load());

  const FieldSpec& field() const noexcept { return spec_; }
  const Mesh& mesh() const noexcept { return mesh_; }
  const Load& load() const noexcept { return load_; }

  /// a(·, y) at the cell midpoints.
  std::vector<double> coefficient(const ParamPoint& y) const;
  double sup_b(const ParamPoint& y) const;

  FemSolution solve(const ParamPoint& y) const;
  SolveResult solve_with_residual(const ParamPoint& y) const;
  /// Solve with the midpoint coefficient supplied directly.
  SolveResult solve_coefficient(std::span<const double> a_mid) const;

  /// ‖f‖_{V'} = ‖w‖_V with -w'' = f discretized on the same mesh.
  double load_dual_norm() const;

private:
  void check_point(const ParamPoint& y) const;

  FieldSpec spec_;
  Mesh mesh_;
  Load load_;
  std::vector<double> rhs_;
  std::vector<std::vector<double>> psi_mid_;
  std::vector<std::vector<double>> psi_node_;
};

FemSolution solve(const FieldSpec& spec, const Mesh& mesh, const ParamPoint& y, const Load& load = Load::constant_load());

/// Discrete H¹₀ seminorm √(Σ_cells (Δu / h)² h).
double v_norm(const FemSolution& u);
/// V inner product matching v_norm.
double v_inner(const FemSolution& u, const FemSolution& v);
double apply_functional(const Functional& phi, const FemSolution& u);

struct FdDerivative {
  FemSolution value;
  /// Richardson estimate ‖D_h - D_{h/2}‖_V · 4/3 of the O(h²) error in value.
  double error_estimate = 0.0;
};

/// Tensorized central differences approximating ∂^s u(y) for |s|_1 <= 3.
FdDerivative fd_parametric_derivative(const ParametricProblem& problem, const ParamPoint& y, const MultiIndex& s,
                                      double step);

}  // namespace gpwpc
