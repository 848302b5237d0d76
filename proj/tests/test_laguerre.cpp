#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gpwpc/error.hpp"
#include "gpwpc/laguerre.hpp"

using namespace gpwpc;

namespace {

double classical(int s, double a, double y);

// Gauss rule for γ_a: nodes from a dense eigen-solve of the Jacobi matrix,
// weights from the Christoffel formula 1 / Σ_j L_j(y)² with the classical
// recurrence (dense eigenvectors only carry absolute accuracy).
GaussRule eigen_rule(double a, int m) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    J(k, k) = 2.0 * k + a;
    if (k + 1 < m) J(k, k + 1) = J(k + 1, k) = std::sqrt((k + 1.0) * (k + a));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  GaussRule r;
  r.level = m;
  for (int k = 0; k < m; ++k) {
    const double y = es.eigenvalues()(k);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += classical(j, a, y) * classical(j, a, y);
    r.nodes.push_back(y);
    r.weights.push_back(1.0 / sum);
  }
  return r;
}

// Classical (unnormalized) generalized Laguerre recurrence, then normalized
// and sign-adjusted to L_1 = (a - y)/√a.
double classical(int s, double a, double y) {
  const double alpha = a - 1.0;
  double p0 = 1.0, p1 = 1.0 + alpha - y;
  if (s == 0) return 1.0;
  for (int k = 1; k < s; ++k) {
    const double p2 = ((2.0 * k + 1.0 + alpha - y) * p1 - (k + alpha) * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  const double norm = std::sqrt(std::exp(std::lgamma(s + a) - std::lgamma(a) - std::lgamma(s + 1.0)));
  return p1 / norm;
}

double rising(double a, int k) {
  long double r = 1.0L;
  for (int i = 0; i < k; ++i) r *= static_cast<long double>(a) + i;
  return static_cast<double>(r);
}

}  // namespace

TEST_CASE("first polynomials") {
  for (double a : {0.5, 1.0, 2.0, 3.3}) {
    const LaguerreBasis b(a);
    for (double y : {0.0, 0.4, 2.0, 7.5}) {
      CHECK(b.eval(0, y) == 1.0);
      CHECK(b.eval(1, y) == doctest::Approx((a - y) / std::sqrt(a)).epsilon(1e-14));
    }
  }
}

TEST_CASE("recurrence matches the classical normalization") {
  for (double a : {0.5, 1.0, 2.0})
    for (int s = 0; s <= 25; ++s)
      for (double y : {0.05, 1.0, 3.0, 12.0}) {
        const LaguerreBasis b(a);
        CHECK(b.eval(s, y) == doctest::Approx(classical(s, a, y)).epsilon(1e-10).scale(1.0));
      }
}

TEST_CASE("eval_all agrees with eval") {
  const LaguerreBasis b(1.7);
  const auto all = b.eval_all(12, 2.3);
  REQUIRE(all.size() == 13);
  for (int s = 0; s <= 12; ++s) CHECK(all[s] == doctest::Approx(b.eval(s, 2.3)).epsilon(1e-15));
}

TEST_CASE("monomial coefficients evaluate to the same polynomial") {
  for (double a : {0.5, 1.0, 2.0}) {
    const LaguerreBasis b(a);
    for (int s = 0; s <= 10; ++s) {
      const auto c = b.monomial_coefficients(s);
      REQUIRE(c.size() == static_cast<std::size_t>(s + 1));
      for (double y : {0.0, 0.3, 1.7, 4.0}) {
        double v = 0.0;
        for (int i = s; i >= 0; --i) v = v * y + c[i];
        CHECK(v == doctest::Approx(b.eval(s, y)).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("Gram matrix under the gamma law") {
  for (double a : {0.5, 1.0, 2.0}) {
    const LaguerreBasis b(a);
    const GaussRule r = eigen_rule(a, 22);
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) {
        double g = 0.0;
        for (int k = 0; k < 22; ++k) g += r.weights[k] * b.eval(i, r.nodes[k]) * b.eval(j, r.nodes[k]);
        CHECK(std::abs(g - (i == j)) <= 1e-10);
      }
  }
}

TEST_CASE("Gauss rule: small cases") {
  for (double a : {0.5, 1.0, 2.0}) {
    const GaussRule r = gauss_rule(a, 1);
    REQUIRE(r.nodes.size() == 1);
    CHECK(r.nodes[0] == doctest::Approx(a).epsilon(1e-14));
    CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  const GaussRule r2 = gauss_rule(1.0, 2);
  CHECK(r2.nodes[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("Gauss rule agrees with a dense eigen-solve and integrates moments") {
  for (double a : {0.5, 1.0, 2.0})
    for (int m : {1, 2, 5, 13, 24}) {
      const GaussRule r = gauss_rule(a, m);
      const GaussRule e = eigen_rule(a, m);
      double wsum = 0.0;
      for (int k = 0; k < m; ++k) {
        CHECK(r.nodes[k] == doctest::Approx(e.nodes[k]).epsilon(1e-11));
        CHECK(r.weights[k] == doctest::Approx(e.weights[k]).epsilon(1e-8).scale(1e-300));
        CHECK(r.weights[k] > 0.0);
        if (k) CHECK(r.nodes[k] > r.nodes[k - 1]);
        wsum += r.weights[k];
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
      for (int d = 0; d <= 2 * m - 1; ++d) {
        long double s = 0.0L;
        for (int k = 0; k < m; ++k) s += static_cast<long double>(r.weights[k]) * std::pow((long double)r.nodes[k], d);
        CHECK(static_cast<double>(s) == doctest::Approx(rising(a, d)).epsilon(1e-10));
      }
    }
}

TEST_CASE("tridiagonal eigen solver on a known matrix") {
  // diag 2, offdiag -1: eigenvalues 2 - 2cos(kπ/(n+1))
  const int n = 7;
  auto [vals, first] = tridiagonal_eigen_first_row(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
  const double pi = std::acos(-1.0);
  for (int k = 1; k <= n; ++k) {
    CHECK(vals[k - 1] == doctest::Approx(2.0 - 2.0 * std::cos(k * pi / (n + 1))).epsilon(1e-13));
    // first component of the k-th eigenvector: √(2/(n+1)) sin(kπ/(n+1))
    const double v = std::sqrt(2.0 / (n + 1)) * std::sin(k * pi / (n + 1));
    CHECK(std::abs(first[k - 1]) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("symmetric nodes") {
  const auto n1 = symmetric_nodes(gauss_rule(1.0, 1));
  REQUIRE(n1.size() == 2);
  CHECK(n1[0].first == -1);
  CHECK(n1[0].second == doctest::Approx(-1.0));
  CHECK(n1[1].first == 1);
  CHECK(n1[1].second == doctest::Approx(1.0));
  const auto n0 = symmetric_nodes(GaussRule{});
  REQUIRE(n0.size() == 1);
  CHECK(n0[0].first == 0);
  CHECK(n0[0].second == 0.0);
  const auto n6 = symmetric_nodes(gauss_rule(2.0, 6));
  REQUIRE(n6.size() == 12);
  for (std::size_t i = 1; i < n6.size(); ++i) CHECK(n6[i].second > n6[i - 1].second);
  for (std::size_t i = 0; i < 6; ++i) CHECK(n6[i].second == -n6[11 - i].second);
}

TEST_CASE("piecewise basis") {
  const LaguerreBasis b(1.0);
  CHECK(eval_piecewise({1, 0}, -2.0, b) == 0.0);
  CHECK(eval_piecewise({1, 0}, 2.0, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK(eval_piecewise({-1, 3}, 2.0, b) == 0.0);
  CHECK(eval_piecewise({-1, 3}, -2.0, b) == doctest::Approx(std::sqrt(2.0) * b.eval(3, 2.0)));
  // orthonormal under λ_a via half-line Gauss rules
  for (double a : {0.5, 1.0, 2.0}) {
    const LaguerreBasis B(a);
    const GaussRule r = eigen_rule(a, 24);
    for (int d1 : {-1, 1})
      for (int d2 : {-1, 1})
        for (int i = 0; i <= 20; ++i)
          for (int j = 0; j <= 20; ++j) {
            double g = 0.0;
            for (int side : {-1, 1})
              for (int k = 0; k < 24; ++k) {
                const double y = side * r.nodes[k];
                g += 0.5 * r.weights[k] * eval_piecewise({d1, i}, y, B) * eval_piecewise({d2, j}, y, B);
              }
            CHECK(std::abs(g - ((d1 == d2 && i == j) ? 1.0 : 0.0)) <= 1e-10);
          }
  }
}

TEST_CASE("tilde basis is even with unit norm") {
  for (double a : {0.5, 1.0, 2.0}) {
    const LaguerreBasis b(a);
    const GaussRule r = eigen_rule(a, 20);
    for (int s = 0; s <= 12; ++s) {
      for (double y : {0.3, 1.1, 5.0}) CHECK(eval_tilde(s, y, b) == eval_tilde(s, -y, b));
      CHECK(eval_tilde(0, 3.0, b) == 1.0);
      double g = 0.0;
      for (int side : {-1, 1})
        for (int k = 0; k < 20; ++k) g += 0.5 * r.weights[k] * std::pow(eval_tilde(s, side * r.nodes[k], b), 2);
      CHECK(g == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("differential operator eigenrelation") {
  for (double a : {0.5, 1.0, 2.0}) {
    const LaguerreBasis b(a);
    for (int delta : {-1, 1})
      for (int s = 0; s <= 15; ++s) {
        const auto c = b.monomial_coefficients(s);
        for (int r : {1, 2}) {
          const auto dc = apply_D(c, delta, r, a);
          double res = 0.0, nrm = 0.0;
          for (std::size_t i = 0; i < std::max(c.size(), dc.size()); ++i) {
            const double ci = i < c.size() ? c[i] : 0.0;
            const double di = i < dc.size() ? dc[i] : 0.0;
            res += std::pow(di - std::pow(s, r) * ci, 2);
            nrm += ci * ci;
          }
          CHECK(std::sqrt(res) <= 1e-10 * std::pow(std::max(s, 1), r) * std::sqrt(nrm));
        }
      }
  }
  const std::vector<double> constant{3.0};
  for (int r : {1, 2, 3})
    for (double v : apply_D(constant, 1, r, 1.3)) CHECK(v == 0.0);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(LaguerreBasis(0.0), Error);
  const LaguerreBasis b(1.0, 10);
  CHECK_THROWS_AS(b.eval(11, 1.0), Error);
  CHECK_THROWS_AS(gauss_rule(1.0, -1), Error);
}
