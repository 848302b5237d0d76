#pragma once

#include <span>
#include <utility>
#include <vector>

namespace gpwpc {

inline constexpr int kDefaultMaxDegree = 64;

/// Orthonormal generalized Laguerre polynomials L_s = L_s^{(a-1)} with respect
/// to the gamma law γ_a, normalized so that L_1(y) = (a - y)/√a.
///
/// The three-term recurrence is
///   √β_{k+1} L_{k+1} = (α_k - y) L_k - √β_k L_{k-1},
/// with α_k = 2k + a and β_k = k (k + a - 1), which are the Jacobi-matrix
/// entries of γ_a.
class LaguerreBasis {
public:
  explicit LaguerreBasis(double a, int max_degree = kDefaultMaxDegree);

  double a() const noexcept { return a_; }
  int max_degree() const noexcept { return max_degree_; }

  double alpha(int k) const { return alpha_.at(static_cast<std::size_t>(k)); }
  /// √β_k for k >= 1.
  double sqrt_beta(int k) const { return sqrt_beta_.at(static_cast<std::size_t>(k)); }

  double eval(int s, double y) const;
  /// Values L_0(y), ..., L_{degree}(y) written into out (size degree + 1).
  void eval_all(int degree, double y, std::span<double> out) const;
  std::vector<double> eval_all(int degree, double y) const;

  /// Monomial coefficients c_0..c_s of L_s from the closed form
  ///   L_s^{(a-1)}(t) = Σ_i (-1)^i Γ(s+a) / (Γ(s-i+1) Γ(a+i) i!) t^i,
  /// divided by the γ_a-norm √(Γ(s+a) / (Γ(a) s!)).
  std::vector<double> monomial_coefficients(int s) const;

private:
  void check_degree(int s) const;

  double a_;
  int max_degree_;
  std::vector<double> alpha_;
  std::vector<double> sqrt_beta_;
};

/// m-point Gauss rule for γ_a: increasing positive nodes (roots of L_m) and
/// positive weights summing to one.
struct GaussRule {
  int level = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_rule(const LaguerreBasis& basis, int m);
GaussRule gauss_rule(double a, int m);

/// Eigenvalues of the symmetric tridiagonal matrix (diag, offdiag) in
/// increasing order, together with the first component of each normalized
/// eigenvector, by implicit-shift QL. offdiag[i] couples rows i and i+1.
std::pair<std::vector<double>, std::vector<double>> tridiagonal_eigen_first_row(std::vector<double> diag,
                                                                                std::vector<double> offdiag);

/// (k, y_{m;k}) for k = -m..-1, 1..m with y_{m;-k} = -y_{m;k}; {(0, 0)} for m = 0.
std::vector<std::pair<int, double>> symmetric_nodes(const GaussRule& rule);

/// Sign decoration δ together with the degree s of a piecewise basis function.
struct SignedBasisIndex {
  int delta = 1;
  int s = 0;
};

/// L_{δ,s}(y) = √2 L_s(δy) on R_δ = {δy >= 0}, zero elsewhere. The √2 factor
/// makes the family orthonormal in L2(R; λ_a).
double eval_piecewise(SignedBasisIndex index, double y, const LaguerreBasis& basis);

/// L̃_s(y) = L_s(|y|): even, continuous, unit λ_a-norm.
double eval_tilde(int s, double y, const LaguerreBasis& basis);

/// Applies (D_δ)^r in the variable t = δy, where
/// D = -t d²/dt² - (a - t) d/dt, to a polynomial given by monomial
/// coefficients in t. In that variable D_δ coincides with D.
std::vector<double> apply_D(std::span<const double> poly, int delta, int r, double a);

}  // namespace gpwpc
