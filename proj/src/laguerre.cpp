#include "gpwpc/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "gpwpc/error.hpp"

namespace gpwpc {

LaguerreBasis::LaguerreBasis(double a, int max_degree) : a_(a), max_degree_(max_degree) {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorKind::InvalidParameter, "Laguerre parameter a must be positive");
  if (max_degree < 0) fail(ErrorKind::InvalidParameter, "negative maximum degree");
  // One extra recurrence entry so that the Jacobi matrix of order max_degree + 1
  // (and L_{max_degree + 1} for Newton polishing) stays available.
  alpha_.resize(static_cast<std::size_t>(max_degree) + 2);
  sqrt_beta_.resize(static_cast<std::size_t>(max_degree) + 2, 0.0);
  for (std::size_t k = 0; k < alpha_.size(); ++k) {
    const double kd = static_cast<double>(k);
    alpha_[k] = 2.0 * kd + a;
    if (k >= 1) sqrt_beta_[k] = std::sqrt(kd * (kd + a - 1.0));
  }
}

void LaguerreBasis::check_degree(int s) const {
  if (s < 0) fail(ErrorKind::InvalidParameter, "negative polynomial degree");
  if (s > max_degree_)
    fail(ErrorKind::Capacity,
         "degree " + std::to_string(s) + " exceeds precomputed maximum " + std::to_string(max_degree_));
}

double LaguerreBasis::eval(int s, double y) const {
  check_degree(s);
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < s; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double next = ((alpha_[ku] - y) * cur - sqrt_beta_[ku] * prev) / sqrt_beta_[ku + 1];
    prev = cur;
    cur = next;
  }
  return cur;
}

void LaguerreBasis::eval_all(int degree, double y, std::span<double> out) const {
  check_degree(degree);
  out[0] = 1.0;
  if (degree == 0) return;
  out[1] = (alpha_[0] - y) / sqrt_beta_[1];
  for (int k = 1; k < degree; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out[ku + 1] = ((alpha_[ku] - y) * out[ku] - sqrt_beta_[ku] * out[ku - 1]) / sqrt_beta_[ku + 1];
  }
}

std::vector<double> LaguerreBasis::eval_all(int degree, double y) const {
  std::vector<double> out(static_cast<std::size_t>(degree) + 1);
  eval_all(degree, y, out);
  return out;
}

std::vector<double> LaguerreBasis::monomial_coefficients(int s) const {
  check_degree(s);
  const double sd = s;
  const double log_norm = 0.5 * (std::lgamma(sd + a_) - std::lgamma(a_) - std::lgamma(sd + 1.0));
  std::vector<double> c(static_cast<std::size_t>(s) + 1);
  for (int i = 0; i <= s; ++i) {
    const double id = i;
    const double log_mag =
        std::lgamma(sd + a_) - std::lgamma(sd - id + 1.0) - std::lgamma(a_ + id) - std::lgamma(id + 1.0) - log_norm;
    c[static_cast<std::size_t>(i)] = ((i % 2 == 0) ? 1.0 : -1.0) * std::exp(log_mag);
  }
  return c;
}

std::pair<std::vector<double>, std::vector<double>> tridiagonal_eigen_first_row(std::vector<double> d,
                                                                                std::vector<double> offdiag) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return {};
  if (static_cast<int>(offdiag.size()) != n - 1)
    fail(ErrorKind::InvalidParameter, "tridiagonal off-diagonal has wrong length");
  std::vector<double> e(std::move(offdiag));
  e.push_back(0.0);
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  z[0] = 1.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) fail(ErrorKind::NumericalFailure, "implicit QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          const double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          const double zf = z[i + 1];
          z[i + 1] = s * z[i] + c * zf;
          z[i] = c * z[i] - s * zf;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  std::vector<double> values(order.size());
  std::vector<double> first(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    values[i] = d[order[i]];
    first[i] = z[order[i]];
  }
  return {values, first};
}

GaussRule gauss_rule(const LaguerreBasis& basis, int m) {
  if (m < 1) fail(ErrorKind::InvalidParameter, "Gauss rule level must be at least 1");
  if (m > basis.max_degree()) fail(ErrorKind::Capacity, "Gauss rule level exceeds basis capacity");
  std::vector<double> diag(static_cast<std::size_t>(m));
  std::vector<double> off(static_cast<std::size_t>(m) - 1);
  for (int k = 0; k < m; ++k) diag[static_cast<std::size_t>(k)] = basis.alpha(k);
  for (int k = 1; k < m; ++k) off[static_cast<std::size_t>(k) - 1] = basis.sqrt_beta(k);
  auto [nodes, first] = tridiagonal_eigen_first_row(std::move(diag), std::move(off));

  GaussRule rule;
  rule.level = m;
  rule.weights.resize(nodes.size());
  std::vector<double> values(static_cast<std::size_t>(m) + 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double x = nodes[i];
    // One Newton step on L_m polishes the eigenvalue; the derivative follows
    // from differentiating the recurrence.
    {
      double p0 = 0.0, p1 = 1.0, d0 = 0.0, d1 = 0.0;
      for (int k = 0; k < m; ++k) {
        const double sb_next = basis.sqrt_beta(k + 1);
        const double sb = basis.sqrt_beta(k);
        const double p2 = ((basis.alpha(k) - x) * p1 - sb * p0) / sb_next;
        const double d2 = ((basis.alpha(k) - x) * d1 - p1 - sb * d0) / sb_next;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
      }
      if (d1 != 0.0 && std::isfinite(p1 / d1)) {
        const double step = p1 / d1;
        if (std::abs(step) < 1e-6 * (1.0 + std::abs(x))) x -= step;
      }
    }
    nodes[i] = x;
    // Squared first eigenvector component, written in its Christoffel form
    // 1 / Σ_k L_k(x)^2, which keeps full relative accuracy for tiny weights.
    basis.eval_all(m - 1, x, values);
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += values[static_cast<std::size_t>(k)] * values[static_cast<std::size_t>(k)];
    rule.weights[i] = 1.0 / sum;
    if (!std::isfinite(rule.weights[i]) || std::isnan(first[i]))
      fail(ErrorKind::NumericalFailure, "non-finite Gauss weight");
  }
  rule.nodes = std::move(nodes);
  for (std::size_t i = 1; i < rule.nodes.size(); ++i)
    if (!(rule.nodes[i] > rule.nodes[i - 1])) fail(ErrorKind::NumericalFailure, "Gauss nodes not strictly increasing");
  return rule;
}

GaussRule gauss_rule(double a, int m) {
  const LaguerreBasis basis(a, std::max(m, kDefaultMaxDegree));
  return gauss_rule(basis, m);
}

std::vector<std::pair<int, double>> symmetric_nodes(const GaussRule& rule) {
  const int m = rule.level;
  if (m == 0) return {{0, 0.0}};
  std::vector<std::pair<int, double>> out;
  out.reserve(2 * static_cast<std::size_t>(m));
  for (int k = m; k >= 1; --k) out.emplace_back(-k, -rule.nodes[static_cast<std::size_t>(k) - 1]);
  for (int k = 1; k <= m; ++k) out.emplace_back(k, rule.nodes[static_cast<std::size_t>(k) - 1]);
  return out;
}

double eval_piecewise(SignedBasisIndex index, double y, const LaguerreBasis& basis) {
  if (index.delta != 1 && index.delta != -1) fail(ErrorKind::InvalidParameter, "sign must be +1 or -1");
  const double t = index.delta * y;
  if (t < 0.0) return 0.0;
  return std::numbers::sqrt2 * basis.eval(index.s, t);
}

double eval_tilde(int s, double y, const LaguerreBasis& basis) { return basis.eval(s, std::abs(y)); }

std::vector<double> apply_D(std::span<const double> poly, int delta, int r, double a) {
  if (delta != 1 && delta != -1) fail(ErrorKind::InvalidParameter, "sign must be +1 or -1");
  if (r < 0) fail(ErrorKind::InvalidParameter, "negative operator power");
  std::vector<double> cur(poly.begin(), poly.end());
  for (int step = 0; step < r; ++step) {
    std::vector<double> next(cur.size(), 0.0);
    // D t^n = n t^n - n (n - 1 + a) t^{n-1}
    for (std::size_t n = 1; n < cur.size(); ++n) {
      const double nd = static_cast<double>(n);
      next[n] += nd * cur[n];
      next[n - 1] -= nd * (nd - 1.0 + a) * cur[n];
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace gpwpc
