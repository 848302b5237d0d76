#include "gpwpc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpwpc/error.hpp"
#include "gpwpc/laguerre.hpp"
#include "gpwpc/pde_model.hpp"

namespace gpwpc {

void MeasureParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorKind::InvalidParameter, "shape parameter a must be positive");
}

double gamma_pdf(MeasureParams params, double y) {
  params.validate();
  if (y < 0.0) fail(ErrorKind::InvalidParameter, "gamma density is supported on y >= 0");
  if (y == 0.0) {
    if (params.a < 1.0) fail(ErrorKind::SingularPoint, "gamma density is unbounded at 0 for a < 1");
    return params.a == 1.0 ? 1.0 : 0.0;
  }
  return std::exp(-y + (params.a - 1.0) * std::log(y) - std::lgamma(params.a));
}

double laplace_pdf(MeasureParams params, double y) { return 0.5 * gamma_pdf(params, std::abs(y)); }

double sample_gamma(double a, CounterRng& rng) {
  if (!(a > 0.0)) fail(ErrorKind::InvalidParameter, "gamma shape must be positive");
  if (a < 1.0) {
    // G(a) = G(a + 1) U^{1/a}
    const double g = sample_gamma(a + 1.0, rng);
    return g * std::pow(rng.uniform_open(), 1.0 / a);
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = rng.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_laplace(MeasureParams params, CounterRng& rng) {
  params.validate();
  const bool negative = rng.coin();
  const double g = sample_gamma(params.a, rng);
  return negative ? -g : g;
}

std::vector<double> sample_laplace(MeasureParams params, RandomStream stream, std::size_t count) {
  params.validate();
  CounterRng rng(stream);
  std::vector<double> out(count);
  for (auto& y : out) y = sample_laplace(params, rng);
  return out;
}

McEstimate estimate_Br(const FieldSpec& field, const Mesh& mesh, std::span<const int> dims, int r,
                       RandomStream stream, std::size_t mc_samples) {
  field.validate();
  mesh.validate();
  if (mc_samples < 1) fail(ErrorKind::InvalidParameter, "need at least one Monte-Carlo sample");
  if (r < 0) fail(ErrorKind::InvalidParameter, "r must be non-negative");
  for (int d : dims)
    if (d < 1 || d > field.dims) fail(ErrorKind::InvalidParameter, "dimension outside the field");

  CounterRng rng(stream);
  double sum = 0.0, sum2 = 0.0, largest = 0.0;
  for (std::size_t n = 0; n < mc_samples; ++n) {
    ParamPoint y;
    for (int j = 1; j <= field.dims; ++j) y.set(j, sample_laplace(field.measure, rng));
    double w = 1.0;
    for (int d : dims) w *= std::pow(1.0 + std::abs(y.get(d)), 2.0 * r);
    const double sample = w * std::exp(2.0 * field_sup_norm(field, mesh, y));
    if (!std::isfinite(sample)) fail(ErrorKind::DivergentIntegral, "integrand overflow in B_r estimate");
    sum += sample;
    sum2 += sample * sample;
    largest = std::max(largest, sample);
  }
  const double n = static_cast<double>(mc_samples);
  if (mc_samples >= 100 && largest > 0.5 * sum)
    fail(ErrorKind::DivergentIntegral, "a single draw carries more than half of the B_r integral");
  if (!std::isfinite(sum2)) fail(ErrorKind::DivergentIntegral, "second moment overflow in B_r estimate");
  const double mean = sum / n;
  const double var = mc_samples > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) : 0.0;
  const double se_mean = std::sqrt(var / n);
  const double value = std::sqrt(mean);
  // delta method for the square root
  return {value, value > 0.0 ? se_mean / (2.0 * value) : 0.0};
}

double compute_K_arb(double a, int r, double b0) {
  MeasureParams{a}.validate();
  if (r < 0) fail(ErrorKind::InvalidParameter, "r must be non-negative");
  if (!(b0 >= 0.0)) fail(ErrorKind::InvalidParameter, "b0 must be non-negative");
  if (b0 >= 0.5) fail(ErrorKind::DivergentIntegral, "K_{a,r,b} diverges for b0 >= 1/2");
  const double c = 1.0 - 2.0 * b0;
  // With t = c y the integral becomes c^{-a} ∫ (1 + t/c)^{2r} dγ_a(t), a
  // polynomial of degree 2r against γ_a.
  const GaussRule rule = gauss_rule(a, r + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * std::pow(1.0 + rule.nodes[i] / c, 2.0 * r);
  return std::sqrt(std::pow(c, -a) * sum);
}

}  // namespace gpwpc
