#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gpwpc/laguerre.hpp"
#include "gpwpc/measures.hpp"
#include "gpwpc/multiindex.hpp"
#include "gpwpc/pde_model.hpp"
#include "gpwpc/random.hpp"

namespace gpwpc {

/// Value of the tensor basis function for (δ, s) at y: the product over
/// j ∈ J_s of L_{δ_j, s_j}(y_j), or sgn(y_j) (with sgn(0) = 1) where δ_j = 0.
double signed_basis_value(const SignedMultiIndex& index, const ParamPoint& y, const LaguerreBasis& basis);

/// ∫ of the basis function for (δ, s) against λ_a: 1 for the empty index and
/// 0 otherwise.
double signed_basis_moment(const SignedMultiIndex& index);

struct CoefficientEntry {
  SignedMultiIndex index;
  FemSolution value;
};

/// u_{δ,s} for every s <= box and every decoration δ of s.
class CoefficientTable {
public:
  CoefficientTable() = default;
  CoefficientTable(MultiIndex box, int quad_margin, double a, std::vector<CoefficientEntry> entries);

  const MultiIndex& box() const noexcept { return box_; }
  int quad_margin() const noexcept { return quad_margin_; }
  double a() const noexcept { return a_; }
  const std::vector<CoefficientEntry>& entries() const noexcept { return entries_; }
  bool covers(const MultiIndex& s) const noexcept { return s.is_le(box_); }

  /// Nullptr when (δ, s) is not stored.
  const FemSolution* find(const SignedMultiIndex& index) const;
  /// All s <= box in graded lexicographic order.
  std::vector<MultiIndex> indices() const;
  /// ‖ũ_s‖²_V = Σ_δ ‖u_{δ,s}‖²_V.
  double tilde_norm_sq(const MultiIndex& s) const;
  double tilde_norm(const MultiIndex& s) const;
  /// Σ over the whole box of ‖u_{δ,s}‖²_V.
  double total_norm_sq() const;

private:
  MultiIndex box_;
  int quad_margin_ = 0;
  double a_ = 1.0;
  std::vector<CoefficientEntry> entries_;
  std::map<SignedMultiIndex, std::size_t> lookup_;
  std::map<MultiIndex, double> tilde_sq_;
};

inline constexpr std::size_t kDefaultTensorPointCap = 2'000'000;

/// Tensor symmetric Gauss rule of level box_j + quad_margin in every field
/// dimension, applied to u(y) times each basis function; one solve per point.
CoefficientTable compute_coefficients(const ParametricProblem& problem, const MultiIndex& box, int quad_margin = 3,
                                      std::size_t point_cap = kDefaultTensorPointCap);

/// Same rule applied to a scalar function of y (used to check the
/// quadrature on closed-form integrands).
std::map<SignedMultiIndex, double> compute_scalar_coefficients(const std::function<double(const ParamPoint&)>& g,
                                                               int dims, double a, const MultiIndex& box,
                                                               int quad_margin = 3);

/// y ↦ Σ_{s∈Λ} Σ_δ u_{δ,s} L_{δ,s}(y). Keeps its own copy of the terms.
class TruncatedExpansion {
public:
  TruncatedExpansion(const CoefficientTable& table, const IndexSet& set);
  FemSolution operator()(const ParamPoint& y) const;
  std::size_t terms() const noexcept { return terms_.size(); }

private:
  std::vector<CoefficientEntry> terms_;
  LaguerreBasis basis_;
  int cells_;
};

TruncatedExpansion truncate_S_Lambda(const CoefficientTable& table, const IndexSet& set);

/// Draws y_1..y_N from λ_a over the field dimensions and solves at each.
/// Shared by every error estimate so that approximants are compared on common
/// random numbers.
struct McReference {
  std::vector<ParamPoint> points;
  std::vector<FemSolution> solutions;
};

std::vector<ParamPoint> sample_points(int dims, double a, RandomStream stream, std::size_t count);
McReference make_mc_reference(const ParametricProblem& problem, RandomStream stream, std::size_t count);

/// Mean of ‖u(y) - A(y)‖²_V over the reference sample with its standard error.
McEstimate mc_sq_error(const McReference& ref, const std::function<FemSolution(const ParamPoint&)>& approx);
/// Mean of ‖u(y)‖²_V with standard error.
McEstimate mc_sq_norm(const McReference& ref);
/// Square root of a squared-error estimate, standard error by the delta method.
McEstimate sqrt_estimate(const McEstimate& sq);

struct SparsityReport {
  /// (s, ‖ũ_s‖_V), nonincreasing in the norm, ties in graded lexicographic order.
  std::vector<std::pair<MultiIndex, double>> sorted;
  /// (p, (Σ ‖ũ_s‖^p)^{1/p}).
  std::vector<std::pair<double, double>> lp_norms;
  /// -slope of the log-log fit of the sorted norms against their rank.
  double decay_exponent = 0.0;
  double fit_r2 = 0.0;
  /// MC ‖u‖² minus Σ ‖ũ_s‖² when an MC norm is supplied.
  std::optional<double> parseval_residual;
  /// Σ (σ_s ‖ũ_s‖)² when a weight configuration is supplied.
  std::optional<double> weighted_sum;
};

SparsityReport sparsity_report(const CoefficientTable& table, std::span<const double> p_list,
                               const WeightConfig* weights = nullptr, std::optional<double> mc_norm_sq = {});

/// Energy expected beyond the box: per dimension j the layer s_j = box_j is
/// compared with the layer s_j = box_j - 1, and the ratio ρ_j extends the
/// layer energy geometrically, E_j ρ_j / (1 - ρ_j). Infinite when some ρ_j >= 1
/// (no decay observed) and zero for dimensions with box_j = 0.
double parseval_tail_allowance(const CoefficientTable& table);

struct BestNTerm {
  std::vector<MultiIndex> selected;
  /// √(Σ of the squared tilde-norms left out, within the box).
  double retained_error = 0.0;
};

BestNTerm best_n_term(const CoefficientTable& table, std::size_t n);

}  // namespace gpwpc
