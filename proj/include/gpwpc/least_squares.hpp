#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gpwpc/laguerre.hpp"
#include "gpwpc/multiindex.hpp"
#include "gpwpc/pde_model.hpp"
#include "gpwpc/point.hpp"
#include "gpwpc/random.hpp"

namespace gpwpc {

enum class SamplingMode { Plain, Christoffel };

inline constexpr double kDefaultKappa = 10.0;
inline constexpr double kRankTolerance = 1e-12;
inline constexpr double kConditionFlag = 1e6;

/// First m signed basis functions: the σ-ordered multi-indices, each
/// expanded into its decorations in lexicographic sign order.
std::vector<SignedMultiIndex> signed_basis_order(const WeightConfig& cfg, std::size_t m, int dim_budget);

/// Weighted least-squares design with its SVD A = U Σ Vᵀ, where
/// A_ij = √ω_i φ_j(y_i).
struct LSDesign {
  std::size_t n = 0;
  std::size_t m = 0;
  double kappa = kDefaultKappa;
  SamplingMode mode = SamplingMode::Plain;
  RandomStream stream;
  double a = 1.0;
  int dims = 1;
  std::vector<SignedMultiIndex> basis;
  std::vector<ParamPoint> samples;
  std::vector<double> weights;

  Eigen::MatrixXd A;
  Eigen::MatrixXd U;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd V;
  std::size_t rank = 0;
  double condition = 0.0;
  bool flagged = false;
  bool rank_deficient = false;

  /// Gram matrix AᵀA.
  Eigen::MatrixXd gram() const { return A.transpose() * A; }
};

/// m = ⌈n/κ⌉.
std::size_t ls_basis_size(std::size_t n, double kappa);

/// Draws the samples (plain: λ_a over `dims` coordinates, ω = 1;
/// christoffel: from (1/m) Σ_j φ_j² dλ_a with ω = m / Σ_j φ_j²) and
/// factorizes the design.
LSDesign draw_design(const WeightConfig& cfg, int dims, double a, std::size_t n, double kappa, SamplingMode mode,
                     RandomStream stream);

/// Design from given basis, samples and weights.
LSDesign make_design(std::vector<SignedMultiIndex> basis, std::vector<ParamPoint> samples, std::vector<double> weights,
                     double a, int dims);

/// One Christoffel draw for basis function φ (dimensions 1..dims).
ParamPoint sample_christoffel_component(const SignedMultiIndex& phi, int dims, double a, CounterRng& rng);

struct LSFit {
  std::vector<double> coefficients;
  bool rank_deficient = false;
};

/// argmin_c Σ_i ω_i |g(y_i) - Σ_j c_j φ_j(y_i)|² (minimum norm when rank deficient).
LSFit fit_scalar(const LSDesign& design, std::span<const double> g);

/// The same solution operator applied to every nodal component.
std::vector<FemSolution> fit_bochner(const LSDesign& design, std::span<const FemSolution> v);

double eval_expansion(const LSDesign& design, std::span<const double> coefficients, const ParamPoint& y);
FemSolution eval_expansion(const LSDesign& design, std::span<const FemSolution> coefficients, const ParamPoint& y);

struct LSQuadrature {
  std::vector<ParamPoint> points;
  std::vector<double> weights;

  template <class T>
  T apply_values(std::span<const T> values) const {
    T acc = 0.0 * values.front();
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
    return acc;
  }
};

/// w = diag(√ω) Pᵀ M with P = V Σ⁺ Uᵀ and M_j = ∫ φ_j dλ_a.
LSQuadrature ls_quadrature(const LSDesign& design);

}  // namespace gpwpc
