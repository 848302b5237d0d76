#include "gpwpc/basis_check.hpp"

#include <algorithm>
#include <cmath>

#include "gpwpc/laguerre.hpp"

namespace gpwpc {

BasisCheck basis_check(double a, int max_degree, int eigen_degree, int gauss_levels) {
  BasisCheck out;
  out.a = a;
  out.max_degree = max_degree;
  out.gauss_levels = gauss_levels;
  const LaguerreBasis basis(a, std::max({max_degree, eigen_degree, gauss_levels}) + 2);

  const GaussRule rule = gauss_rule(basis, max_degree + 2);
  const int n = max_degree + 1;
  std::vector<std::vector<double>> vals;
  for (double y : rule.nodes) vals.push_back(basis.eval_all(max_degree, y));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double g = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) g += rule.weights[k] * vals[k][i] * vals[k][j];
      out.gram_gamma = std::max(out.gram_gamma, std::abs(g - (i == j ? 1.0 : 0.0)));
    }

  // λ_a puts half of γ_a on each side; the mirrored rule integrates exactly.
  for (int di : {-1, 1})
    for (int dj : {-1, 1})
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double g = 0.0;
          for (int side : {-1, 1})
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
              const double y = side * rule.nodes[k];
              g += 0.5 * rule.weights[k] * eval_piecewise({di, i}, y, basis) * eval_piecewise({dj, j}, y, basis);
            }
          const double target = (di == dj && i == j) ? 1.0 : 0.0;
          out.gram_piecewise = std::max(out.gram_piecewise, std::abs(g - target));
        }

  for (int delta : {-1, 1})
    for (int s = 0; s <= eigen_degree; ++s) {
      const std::vector<double> c = basis.monomial_coefficients(s);
      const std::vector<double> dc = apply_D(c, delta, 1, a);
      double res = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = (i < dc.size() ? dc[i] : 0.0) - s * c[i];
        res += d * d;
        norm += c[i] * c[i];
      }
      for (std::size_t i = c.size(); i < dc.size(); ++i) res += dc[i] * dc[i];
      out.eigen_residual = std::max(out.eigen_residual, std::sqrt(res / norm));
    }

  for (int m = 1; m <= gauss_levels; ++m) {
    const GaussRule r = gauss_rule(basis, m);
    // Compare y^d / (a)_d so both sides stay O(1) for large d.
    for (int d = 0; d <= 2 * m - 1; ++d) {
      double sum = 0.0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) {
        double term = r.weights[k];
        for (int e = 0; e < d; ++e) term *= r.nodes[k] / (a + e);
        sum += term;
      }
      out.gauss_moment_error = std::max(out.gauss_moment_error, std::abs(sum - 1.0));
    }
  }
  return out;
}

nlohmann::json to_json(const BasisCheck& c) {
  return {{"a", c.a},
          {"max_degree", c.max_degree},
          {"gram_gamma", c.gram_gamma},
          {"gram_piecewise", c.gram_piecewise},
          {"eigen_residual", c.eigen_residual},
          {"gauss_levels", c.gauss_levels},
          {"gauss_moment_error", c.gauss_moment_error}};
}

}  // namespace gpwpc
