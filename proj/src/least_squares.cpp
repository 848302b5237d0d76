#include "gpwpc/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "gpwpc/error.hpp"
#include "gpwpc/gpc_analysis.hpp"
#include "gpwpc/measures.hpp"

namespace gpwpc {

std::vector<SignedMultiIndex> signed_basis_order(const WeightConfig& cfg, std::size_t m, int dim_budget) {
  if (m < 1) fail(ErrorKind::InvalidParameter, "basis size must be at least 1");
  // every multi-index carries at least one signed function
  const auto indices = order_indices(cfg, m, dim_budget);
  std::vector<SignedMultiIndex> out;
  for (const auto& s : indices) {
    for (auto& d : SignedMultiIndex::decorations(s)) {
      out.push_back(std::move(d));
      if (out.size() == m) return out;
    }
  }
  return out;
}

std::size_t ls_basis_size(std::size_t n, double kappa) {
  if (n < 1) fail(ErrorKind::InvalidParameter, "sample count must be at least 1");
  if (!(kappa >= 1.0)) fail(ErrorKind::InvalidParameter, "oversampling factor must be at least 1");
  const auto m = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / kappa - 1e-12));
  return std::max<std::size_t>(m, 1);
}

namespace {

// Rejection envelope for L_s(t)² g_a(t) dt against a gamma(a, scale θ) proposal.
// The ratio is L_s(t)² θ^a e^{-t(1-1/θ)}; θ is picked per (a, s) to minimise its
// sup, which then grows roughly linearly in s instead of exponentially.
struct Envelope {
  double theta = 2.0;
  double bound = 1.0;
};

double envelope_ratio(const LaguerreBasis& basis, int s, double theta, double t) {
  const double l = basis.eval(s, t);
  return l * l * std::exp(-t * (1.0 - 1.0 / theta) + basis.a() * std::log(theta));
}

double envelope_sup(const LaguerreBasis& basis, int s, double theta, int scan) {
  // the polynomial factor has degree 2s; past t_max the exponential wins for good
  const double t_max = (4.0 * s + 2.0 * basis.a() + 60.0) * theta / (theta - 1.0);
  double best = 0.0;
  for (int i = 0; i <= scan; ++i) best = std::max(best, envelope_ratio(basis, s, theta, t_max * i / scan));
  return best;
}

Envelope envelope_for(const LaguerreBasis& basis, int s) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, Envelope> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({basis.a(), s});
    if (it != cache.end()) return it->second;
  }
  Envelope env;
  double best = std::numeric_limits<double>::infinity();
  const double hi = 8.0 * s + 8.0;
  constexpr int kThetas = 48;
  for (int k = 0; k <= kThetas; ++k) {
    const double theta = 1.05 * std::pow(hi / 1.05, static_cast<double>(k) / kThetas);
    const double sup = envelope_sup(basis, s, theta, 2000);
    if (sup < best) {
      best = sup;
      env.theta = theta;
    }
  }
  env.bound = 1.25 * envelope_sup(basis, s, env.theta, 40000);
  std::lock_guard<std::mutex> lock(mutex);
  cache[{basis.a(), s}] = env;
  return env;
}

double sample_half_line(const LaguerreBasis& basis, int s, CounterRng& rng) {
  const Envelope env = envelope_for(basis, s);
  if (1.0 / env.bound < 1e-4) fail(ErrorKind::SamplerFailure, "rejection acceptance below 1e-4");
  constexpr int kMaxAttempts = 1'000'000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double t = env.theta * sample_gamma(basis.a(), rng);
    if (rng.uniform() * env.bound < envelope_ratio(basis, s, env.theta, t)) return t;
  }
  fail(ErrorKind::SamplerFailure, "rejection sampler stalled");
}

void factorize(LSDesign& d) {
  const std::size_t n = d.samples.size();
  const std::size_t m = d.basis.size();
  if (n < m) fail(ErrorKind::InvalidParameter, "least squares needs n >= m");
  if (d.weights.size() != n) fail(ErrorKind::IncompleteData, "one weight per sample required");
  int max_level = 1;
  for (const auto& b : d.basis) max_level = std::max(max_level, b.base().linf());
  const LaguerreBasis basis(d.a, max_level);
  d.A.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d.weights[i] >= 0.0)) fail(ErrorKind::InvalidParameter, "negative least-squares weight");
    const double sw = std::sqrt(d.weights[i]);
    for (std::size_t j = 0; j < m; ++j)
      d.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sw * signed_basis_value(d.basis[j], d.samples[i], basis);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  d.U = svd.matrixU();
  d.V = svd.matrixV();
  d.singular_values = svd.singularValues();
  const double smax = d.singular_values.size() ? d.singular_values(0) : 0.0;
  d.rank = 0;
  for (Eigen::Index i = 0; i < d.singular_values.size(); ++i)
    if (d.singular_values(i) > kRankTolerance * smax) ++d.rank;
  d.rank_deficient = d.rank < m;
  const double smin = d.singular_values.size() ? d.singular_values(d.singular_values.size() - 1) : 0.0;
  d.condition = smin > 0.0 ? (smax * smax) / (smin * smin) : std::numeric_limits<double>::infinity();
  d.flagged = d.condition > kConditionFlag;
}

// P = V Σ⁺ Uᵀ applied to a right-hand side matrix.
Eigen::MatrixXd apply_pinv(const LSDesign& d, const Eigen::MatrixXd& rhs) {
  Eigen::MatrixXd t = d.U.transpose() * rhs;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double s = d.singular_values(i);
    if (static_cast<std::size_t>(i) < d.rank)
      t.row(i) /= s;
    else
      t.row(i).setZero();
  }
  return d.V * t;
}

}  // namespace

ParamPoint sample_christoffel_component(const SignedMultiIndex& phi, int dims, double a, CounterRng& rng) {
  const LaguerreBasis basis(a, std::max(phi.base().linf(), 1));
  ParamPoint y;
  for (int j = 1; j <= dims; ++j) {
    const int s = phi.base().get(j);
    const int sign = s == 0 ? 0 : phi.sign(j);
    double v;
    if (s == 0 || sign == 0) {
      // constant or sgn factor: squared density is λ_a itself
      v = sample_laplace(MeasureParams{a}, rng);
    } else {
      v = sign * sample_half_line(basis, s, rng);
    }
    y.set(j, v);
  }
  return y;
}

LSDesign make_design(std::vector<SignedMultiIndex> basis, std::vector<ParamPoint> samples, std::vector<double> weights,
                     double a, int dims) {
  LSDesign d;
  d.n = samples.size();
  d.m = basis.size();
  d.a = a;
  d.dims = dims;
  d.basis = std::move(basis);
  d.samples = std::move(samples);
  d.weights = std::move(weights);
  factorize(d);
  return d;
}

LSDesign draw_design(const WeightConfig& cfg, int dims, double a, std::size_t n, double kappa, SamplingMode mode,
                     RandomStream stream) {
  MeasureParams{a}.validate();
  const std::size_t m = ls_basis_size(n, kappa);
  LSDesign d;
  d.n = n;
  d.m = m;
  d.kappa = kappa;
  d.mode = mode;
  d.stream = stream;
  d.a = a;
  d.dims = dims;
  d.basis = signed_basis_order(cfg, m, dims);
  int max_level = 1;
  for (const auto& b : d.basis) {
    max_level = std::max(max_level, b.base().linf());
    if (b.base().max_dim() > dims) fail(ErrorKind::InvalidParameter, "basis function outside the sampled dimensions");
  }
  const LaguerreBasis basis(a, max_level);

  CounterRng rng(stream);
  d.samples.reserve(n);
  d.weights.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mode == SamplingMode::Plain) {
      ParamPoint y;
      for (int j = 1; j <= dims; ++j) y.set(j, sample_laplace(MeasureParams{a}, rng));
      d.samples.push_back(std::move(y));
      d.weights.push_back(1.0);
    } else {
      const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(m));
      ParamPoint y = sample_christoffel_component(d.basis[std::min(pick, m - 1)], dims, a, rng);
      double k = 0.0;
      for (const auto& phi : d.basis) {
        const double v = signed_basis_value(phi, y, basis);
        k += v * v;
      }
      d.samples.push_back(std::move(y));
      d.weights.push_back(static_cast<double>(m) / k);
    }
  }
  factorize(d);
  return d;
}

LSFit fit_scalar(const LSDesign& design, std::span<const double> g) {
  if (g.size() != design.samples.size()) fail(ErrorKind::IncompleteData, "one value per sample required");
  Eigen::MatrixXd b(static_cast<Eigen::Index>(g.size()), 1);
  for (std::size_t i = 0; i < g.size(); ++i) b(static_cast<Eigen::Index>(i), 0) = std::sqrt(design.weights[i]) * g[i];
  const Eigen::MatrixXd c = apply_pinv(design, b);
  LSFit fit;
  fit.coefficients.assign(c.data(), c.data() + c.rows());
  fit.rank_deficient = design.rank_deficient;
  return fit;
}

std::vector<FemSolution> fit_bochner(const LSDesign& design, std::span<const FemSolution> v) {
  if (v.size() != design.samples.size()) fail(ErrorKind::IncompleteData, "one sample per design point required");
  const int cells = v.front().cells();
  const std::size_t width = v.front().size();
  for (const auto& s : v)
    if (s.cells() != cells || s.size() != width) fail(ErrorKind::IncompleteData, "samples live on different meshes");
  Eigen::MatrixXd b(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sw = std::sqrt(design.weights[i]);
    for (std::size_t k = 0; k < width; ++k)
      b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = sw * v[i][k];
  }
  const Eigen::MatrixXd c = apply_pinv(design, b);
  std::vector<FemSolution> out;
  out.reserve(design.basis.size());
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    std::vector<double> vals(width);
    for (std::size_t k = 0; k < width; ++k) vals[k] = c(j, static_cast<Eigen::Index>(k));
    out.emplace_back(cells, std::move(vals));
  }
  return out;
}

double eval_expansion(const LSDesign& design, std::span<const double> coefficients, const ParamPoint& y) {
  if (coefficients.size() != design.basis.size()) fail(ErrorKind::IncompleteData, "coefficient count mismatch");
  int max_level = 1;
  for (const auto& b : design.basis) max_level = std::max(max_level, b.base().linf());
  const LaguerreBasis basis(design.a, max_level);
  double acc = 0.0;
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    acc += coefficients[j] * signed_basis_value(design.basis[j], y, basis);
  return acc;
}

FemSolution eval_expansion(const LSDesign& design, std::span<const FemSolution> coefficients, const ParamPoint& y) {
  if (coefficients.size() != design.basis.size()) fail(ErrorKind::IncompleteData, "coefficient count mismatch");
  int max_level = 1;
  for (const auto& b : design.basis) max_level = std::max(max_level, b.base().linf());
  const LaguerreBasis basis(design.a, max_level);
  FemSolution acc(coefficients.front().cells());
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    const double phi = signed_basis_value(design.basis[j], y, basis);
    if (phi != 0.0) acc.axpy(phi, coefficients[j]);
  }
  return acc;
}

LSQuadrature ls_quadrature(const LSDesign& design) {
  const auto m = static_cast<Eigen::Index>(design.basis.size());
  Eigen::VectorXd M(m);
  for (Eigen::Index j = 0; j < m; ++j) M(j) = signed_basis_moment(design.basis[static_cast<std::size_t>(j)]);
  // w = diag(√ω) U Σ⁺ Vᵀ M
  Eigen::VectorXd t = design.V.transpose() * M;
  for (Eigen::Index i = 0; i < t.size(); ++i)
    t(i) = static_cast<std::size_t>(i) < design.rank ? t(i) / design.singular_values(i) : 0.0;
  const Eigen::VectorXd w = design.U * t;
  LSQuadrature q;
  q.points = design.samples;
  q.weights.resize(design.samples.size());
  for (std::size_t i = 0; i < q.weights.size(); ++i)
    q.weights[i] = std::sqrt(design.weights[i]) * w(static_cast<Eigen::Index>(i));
  return q;
}

}  // namespace gpwpc
