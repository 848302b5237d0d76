#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gpwpc/random.hpp"

namespace gpwpc {

struct FieldSpec;
struct Mesh;

/// Shape parameter of the generalized Laplace law λ_a (density
/// e^{-|y|}|y|^{a-1} / (2Γ(a))) and of the gamma law γ_a on the half-line.
struct MeasureParams {
  double a = 1.0;

  void validate() const;
};

double laplace_pdf(MeasureParams params, double y);
double gamma_pdf(MeasureParams params, double y);

/// Marsaglia-Tsang for a >= 1; for a < 1 a gamma(a+1) draw is scaled by U^{1/a}.
double sample_gamma(double a, CounterRng& rng);
double sample_laplace(MeasureParams params, CounterRng& rng);
std::vector<double> sample_laplace(MeasureParams params, RandomStream stream, std::size_t count);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of
///   ( ∫ ∏_{j∈J} (1+|y_j|)^{2r} exp(2‖b(y)‖_∞) dλ_a(y) )^{1/2},
/// with ‖b(y)‖_∞ taken as the maximum over the mesh nodes. Throws
/// DivergentIntegral when the samples overflow or a single draw dominates the
/// running sum (the heavy-tail signature of an infinite integral).
McEstimate estimate_Br(const FieldSpec& field, const Mesh& mesh, std::span<const int> dims, int r,
                       RandomStream stream, std::size_t mc_samples);

/// (∫_{R+} (1+y)^{2r} y^{a-1}/Γ(a) e^{y(2 b0 - 1)} dy)^{1/2}, exact up to
/// rounding: after t = (1-2b0) y the integrand is a polynomial against γ_a.
double compute_K_arb(double a, int r, double b0);

}  // namespace gpwpc
