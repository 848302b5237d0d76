#pragma once

#include <json.hpp>

namespace gpwpc {

/// Self-check of the one-dimensional machinery for one shape parameter a.
struct BasisCheck {
  double a = 1.0;
  int max_degree = 20;
  /// max |G - I| of {L_s} under γ_a, computed with an (s_max + 2)-point Gauss rule.
  double gram_gamma = 0.0;
  /// max |G - I| of {L_{δ,s}} under λ_a, both signs.
  double gram_piecewise = 0.0;
  /// max over s of ‖D L_s - s L_s‖ / ‖L_s‖ in monomial coefficients, both signs.
  double eigen_residual = 0.0;
  /// max relative error of Σ w_k y_k^d against (a)_d, d <= 2m-1, m <= gauss_levels.
  double gauss_moment_error = 0.0;
  int gauss_levels = 40;
};

BasisCheck basis_check(double a, int max_degree = 20, int eigen_degree = 15, int gauss_levels = 40);

nlohmann::json to_json(const BasisCheck& check);

}  // namespace gpwpc
