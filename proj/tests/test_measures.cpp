#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#ifdef GPWPC_HAVE_BOOST
#include <boost/math/special_functions/gamma.hpp>
#endif

#include "gpwpc/error.hpp"
#include "gpwpc/measures.hpp"
#include "gpwpc/pde_model.hpp"

using namespace gpwpc;

TEST_CASE("laplace density closed form") {
  CHECK(laplace_pdf({1.0}, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(laplace_pdf({2.0}, 1.0) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-14));
  CHECK(laplace_pdf({1.0}, -3.0) == laplace_pdf({1.0}, 3.0));
  CHECK(laplace_pdf({1.0}, 3.0) == doctest::Approx(std::exp(-3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("gamma density closed form and relation to laplace") {
  CHECK(gamma_pdf({1.0}, 0.0) == 1.0);
  CHECK(gamma_pdf({1.0}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  for (double a : {0.5, 1.0, 2.0, 3.7})
    for (double y : {0.1, 1.0, 2.5, 10.0}) {
      const double direct = std::exp(-y) * std::pow(y, a - 1.0) / std::tgamma(a);
      CHECK(gamma_pdf({a}, y) == doctest::Approx(direct).epsilon(1e-12));
      CHECK(laplace_pdf({a}, y) == doctest::Approx(gamma_pdf({a}, y) / 2.0).epsilon(1e-15));
      CHECK(laplace_pdf({a}, -y) == laplace_pdf({a}, y));
    }
}

TEST_CASE("density errors") {
  CHECK_THROWS_AS(gamma_pdf({1.0}, -1.0), Error);
  CHECK_THROWS_AS(laplace_pdf({0.0}, 1.0), Error);
  CHECK_THROWS_AS(laplace_pdf({-1.0}, 1.0), Error);
  try {
    gamma_pdf({0.5}, 0.0);
    FAIL("expected singular point");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularPoint);
  }
  CHECK(gamma_pdf({2.0}, 0.0) == 0.0);
}

TEST_CASE("laplace sampler moments") {
  const std::size_t n = 100000;
  for (double a : {0.5, 1.0, 2.0}) {
    const auto ys = sample_laplace({a}, RandomStream{42, 9}, n);
    REQUIRE(ys.size() == n);
    double m = 0.0, ma = 0.0;
    for (double y : ys) {
      m += y;
      ma += std::abs(y);
    }
    m /= n;
    ma /= n;
    // E y = 0 with Var y = a(a+1); E|y| = a with Var|y| = a
    CHECK(std::abs(m) <= 3.0 * std::sqrt(a * (a + 1.0) / n));
    CHECK(std::abs(ma - a) <= 3.0 * std::sqrt(a / n));
  }
  CHECK(sample_laplace({1.0}, RandomStream{1, 1}, 0).empty());
}

TEST_CASE("laplace sampler is reproducible") {
  CHECK(sample_laplace({1.5}, RandomStream{3, 4}, 100) == sample_laplace({1.5}, RandomStream{3, 4}, 100));
}

#ifdef GPWPC_HAVE_BOOST
TEST_CASE("magnitudes follow the gamma law (Kolmogorov-Smirnov)") {
  const std::size_t n = 20000;
  for (double a : {0.5, 1.0, 2.0, 4.5}) {
    auto ys = sample_laplace({a}, RandomStream{17, 2}, n);
    std::vector<double> mags(n);
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mags[i] = std::abs(ys[i]);
      positive += ys[i] > 0.0;
    }
    std::sort(mags.begin(), mags.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = boost::math::gamma_p(a, mags[i]);
      d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    // 1% critical value of the KS statistic
    CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(positive - n / 2.0) < 4.0 * std::sqrt(n / 4.0));
  }
}
#endif

namespace {
FieldSpec flat_field(int dims) {
  FieldSpec f;
  f.dims = dims;
  for (int j = 1; j <= dims; ++j) f.frozen.push_back(j);
  return f;
}
}  // namespace

TEST_CASE("B_r estimate with a flat field") {
  const FieldSpec f = flat_field(2);
  const Mesh mesh;
  const std::vector<int> none;
  const McEstimate e0 = estimate_Br(f, mesh, none, 0, RandomStream{5, 1}, 2000);
  CHECK(e0.value == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<int> one{1};
  const McEstimate e1 = estimate_Br(f, mesh, one, 1, RandomStream{5, 1}, 20000);
  // E(1+|y|)^2 = 1 + 2a + a(a+1) = 5 for a = 1
  CHECK(std::abs(e1.value - std::sqrt(5.0)) <= 3.0 * e1.std_error);
  const McEstimate again = estimate_Br(f, mesh, one, 1, RandomStream{5, 1}, 20000);
  CHECK(again.value == e1.value);
  CHECK(again.std_error == e1.std_error);
}

TEST_CASE("B_r estimate flags a heavy tail") {
  FieldSpec f;
  f.dims = 1;
  f.theta0 = 3.0;
  const std::vector<int> none;
  CHECK_THROWS_AS(estimate_Br(f, Mesh{}, none, 0, RandomStream{5, 2}, 5000), Error);
}

TEST_CASE("K_{a,r,b0} closed forms") {
  CHECK(compute_K_arb(1.0, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(compute_K_arb(1.0, 0, 0.25) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(compute_K_arb(2.0, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  // r = 1, b0 = 0: E(1+y)^2 = 1 + 2a + a(a+1)
  for (double a : {0.5, 1.0, 2.0})
    CHECK(compute_K_arb(a, 1, 0.0) == doctest::Approx(std::sqrt(1.0 + 2.0 * a + a * (a + 1.0))).epsilon(1e-13));
  // r = 1, b0 = 0.25, a = 1: ∫(1+y)^2 e^{-y/2} dy = 2 + 2*4 + 16 = 26
  CHECK(compute_K_arb(1.0, 1, 0.25) == doctest::Approx(std::sqrt(26.0)).epsilon(1e-13));
  CHECK_THROWS_AS(compute_K_arb(1.0, 0, 0.5), Error);
}
