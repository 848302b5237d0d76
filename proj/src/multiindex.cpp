#include "gpwpc/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpwpc/error.hpp"

namespace gpwpc {

namespace {

auto find_dim(const std::vector<std::pair<int, int>>& entries, int dim) {
  return std::lower_bound(entries.begin(), entries.end(), dim, [](const auto& e, int d) { return e.first < d; });
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<std::pair<int, int>> entries) {
  for (const auto& [d, l] : entries) set(d, l);
}

MultiIndex MultiIndex::unit(int dim, int level) {
  MultiIndex s;
  s.set(dim, level);
  return s;
}

MultiIndex MultiIndex::from_dense(std::span<const int> levels) {
  MultiIndex s;
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] != 0) s.set(static_cast<int>(i) + 1, levels[i]);
  return s;
}

int MultiIndex::get(int dim) const noexcept {
  auto it = find_dim(entries_, dim);
  return (it != entries_.end() && it->first == dim) ? it->second : 0;
}

void MultiIndex::set(int dim, int level) {
  if (dim < 1) fail(ErrorKind::InvalidParameter, "multi-index dimensions start at 1");
  if (level < 0) fail(ErrorKind::InvalidParameter, "multi-index levels are non-negative");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), dim, [](const auto& e, int d) { return e.first < d; });
  const bool present = it != entries_.end() && it->first == dim;
  if (level == 0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = level;
  } else {
    entries_.insert(it, {dim, level});
  }
}

MultiIndex MultiIndex::with(int dim, int level) const {
  MultiIndex copy = *this;
  copy.set(dim, level);
  return copy;
}

std::vector<int> MultiIndex::support() const {
  std::vector<int> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

int MultiIndex::l1() const noexcept {
  int sum = 0;
  for (const auto& e : entries_) sum += e.second;
  return sum;
}

int MultiIndex::linf() const noexcept {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, e.second);
  return m;
}

bool MultiIndex::is_le(const MultiIndex& other) const noexcept {
  for (const auto& [d, l] : entries_)
    if (l > other.get(d)) return false;
  return true;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ',';
    os << entries_[i].first << ':' << entries_[i].second;
  }
  os << '}';
  return os.str();
}

bool graded_lex_less(const MultiIndex& lhs, const MultiIndex& rhs) noexcept {
  const int l1l = lhs.l1();
  const int l1r = rhs.l1();
  if (l1l != l1r) return l1l < l1r;
  const auto& a = lhs.entries();
  const auto& b = rhs.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const int da = i < a.size() ? a[i].first : INT32_MAX;
    const int db = j < b.size() ? b[j].first : INT32_MAX;
    const int dim = std::min(da, db);
    const int la = da == dim ? a[i].second : 0;
    const int lb = db == dim ? b[j].second : 0;
    if (la != lb) return la > lb;
    if (da == dim) ++i;
    if (db == dim) ++j;
  }
  return false;
}

SignedMultiIndex::SignedMultiIndex(MultiIndex base, std::vector<int> signs)
    : base_(std::move(base)), signs_(std::move(signs)) {
  if (signs_.size() != base_.entries().size())
    fail(ErrorKind::InvalidParameter, "sign pattern must cover exactly the support of the index");
  const auto& e = base_.entries();
  for (std::size_t i = 0; i < signs_.size(); ++i) {
    const int s = signs_[i];
    if (s != 1 && s != -1 && !(s == 0 && e[i].second == 1))
      fail(ErrorKind::InvalidParameter, "signs must be +1 or -1 (or 0 at level one)");
  }
}

int SignedMultiIndex::sign(int dim) const {
  const auto& e = base_.entries();
  auto it = find_dim(e, dim);
  if (it == e.end() || it->first != dim) fail(ErrorKind::InvalidParameter, "dimension outside the support");
  return signs_[static_cast<std::size_t>(it - e.begin())];
}

std::int64_t SignedMultiIndex::nu() const noexcept {
  std::int64_t n = 1;
  for (const auto& e : base_.entries()) n *= e.second;
  return n;
}

std::vector<SignedMultiIndex> SignedMultiIndex::decorations(const MultiIndex& s) {
  const auto& e = s.entries();
  std::vector<std::vector<int>> choices;
  for (const auto& [d, l] : e) choices.push_back(l == 1 ? std::vector<int>{-1, 0, 1} : std::vector<int>{-1, 1});
  std::vector<SignedMultiIndex> out;
  std::vector<std::size_t> pos(e.size(), 0);
  while (true) {
    std::vector<int> signs(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) signs[i] = choices[i][pos[i]];
    out.emplace_back(s, std::move(signs));
    // odometer, last dimension fastest
    std::size_t i = e.size();
    while (i > 0) {
      --i;
      if (++pos[i] < choices[i].size()) break;
      pos[i] = 0;
      if (i == 0) return out;
    }
    if (e.empty()) return out;
  }
}

std::string SignedMultiIndex::to_string() const {
  std::ostringstream os;
  os << '{';
  const auto& e = base_.entries();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) os << ',';
    os << e[i].first << ':' << (signs_[i] > 0 ? '+' : signs_[i] < 0 ? '-' : 'o') << e[i].second;
  }
  os << '}';
  return os.str();
}

void WeightConfig::set_p(double new_p) {
  p = new_p;
  q = 2.0 * p / (2.0 - p);
}

int WeightConfig::default_r(double p) { return static_cast<int>(std::floor(1.0 / p)) + 1; }

int WeightConfig::dims() const noexcept {
  return static_cast<int>(family == WeightFamily::Rho ? rho.size() : b.size());
}

double WeightConfig::dim_factor_sum(int dim) const {
  if (dim < 1 || dim > dims())
    fail(ErrorKind::InvalidParameter, "weight configuration does not cover dimension " + std::to_string(dim));
  const auto j = static_cast<std::size_t>(dim) - 1;
  if (family == WeightFamily::B) return std::numbers::e * b[j] * b_scaling;
  const double inv = 1.0 / rho[j];
  double term = 1.0;
  double sum = 0.0;
  for (int l = 1; l <= 2 * r; ++l) {
    term *= inv;
    sum += term;
  }
  return sum;
}

double WeightConfig::dim_factor(int dim, int level) const {
  return c_dim * std::pow(static_cast<double>(level), -static_cast<double>(r)) * dim_factor_sum(dim);
}

void WeightConfig::validate(int dim_budget) const {
  if (!(p > 0.0 && p < 2.0)) fail(ErrorKind::InvalidParameter, "p must lie in (0, 2)");
  if (std::abs(q - 2.0 * p / (2.0 - p)) > 1e-12 * q) fail(ErrorKind::InvalidParameter, "q must equal 2p/(2-p)");
  if (r < 1) fail(ErrorKind::InvalidParameter, "r must be at least 1");
  if (theta < 0.0 || lambda < 0.0) fail(ErrorKind::InvalidParameter, "theta and lambda must be non-negative");
  if (!(c_dim > 0.0) || !(c_global > 0.0)) fail(ErrorKind::InvalidParameter, "weight constants must be positive");
  if (dim_budget > dims())
    fail(ErrorKind::InvalidParameter, "weight configuration covers " + std::to_string(dims()) +
                                          " dimensions, budget asks for " + std::to_string(dim_budget));
  if (family == WeightFamily::Rho) {
    for (double v : rho)
      if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::InvalidParameter, "rho_j must be positive");
  } else {
    for (double v : b)
      if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::InvalidParameter, "b_j must be positive");
    if (!(b_scaling > 0.0)) fail(ErrorKind::InvalidParameter, "b scaling must be positive");
  }
  // σ is nondecreasing along the half-order iff every per-dimension factor is
  // at most 1 at level one and nonincreasing in the level (automatic for s^{-r}).
  for (int j = 1; j <= dim_budget; ++j) {
    const double f1 = dim_factor(j, 1);
    if (f1 > 1.0)
      fail(ErrorKind::InvalidWeight, "sigma not monotone: level-one factor of dimension " + std::to_string(j) +
                                         " is " + std::to_string(f1) + " > 1");
  }
}

std::vector<double> rho_family(std::span<const double> b, double eta, double sigma_rho) {
  if (!(sigma_rho > 0.0 && sigma_rho < 1.0)) fail(ErrorKind::InvalidParameter, "sigma_rho must lie in (0, 1)");
  if (!(eta > 0.0 && eta < std::numbers::pi / 2)) fail(ErrorKind::InvalidParameter, "eta must lie in (0, pi/2)");
  double norm = 0.0;
  for (double bj : b) {
    if (!(bj > 0.0)) fail(ErrorKind::InvalidParameter, "b_j must be positive to build the rho family");
    norm += std::pow(bj, sigma_rho);
  }
  std::vector<double> rho(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) rho[j] = eta * std::pow(b[j], sigma_rho - 1.0) / norm;
  return rho;
}

double monotone_c_dim(const WeightConfig& cfg, int dim_budget) {
  WeightConfig probe = cfg;
  probe.c_dim = 1.0;
  double worst = 0.0;
  for (int j = 1; j <= dim_budget; ++j) worst = std::max(worst, probe.dim_factor(j, 1));
  return worst > 1.0 ? 1.0 / worst : 1.0;
}

WeightConfig default_weights(std::span<const double> b, double p, double eta, double sigma_rho) {
  WeightConfig cfg;
  cfg.set_p(p);
  cfg.r = WeightConfig::default_r(p);
  cfg.rho = rho_family(b, eta, sigma_rho);
  cfg.b.assign(b.begin(), b.end());
  cfg.c_dim = monotone_c_dim(cfg, static_cast<int>(b.size()));
  return cfg;
}

double p_weight(const MultiIndex& s, double theta, double lambda) {
  double out = 1.0;
  for (const auto& [d, l] : s.entries()) out *= std::pow(1.0 + lambda * l, theta);
  return out;
}

double beta(const MultiIndex& s, const WeightConfig& cfg) {
  double out = cfg.c_global;
  for (const auto& [d, l] : s.entries()) out *= cfg.dim_factor(d, l);
  return out;
}

double sigma(const MultiIndex& s, const WeightConfig& cfg) { return std::pow(beta(s, cfg), cfg.p / 2.0 - 1.0); }

IndexSet::IndexSet(std::vector<MultiIndex> members, double xi) : members_(std::move(members)), xi_(xi) {
  std::sort(members_.begin(), members_.end(), graded_lex_less);
}

bool IndexSet::contains(const MultiIndex& s) const {
  return std::binary_search(members_.begin(), members_.end(), s, graded_lex_less);
}

bool IndexSet::is_downward_closed() const {
  for (const auto& s : members_)
    for (const auto& [d, l] : s.entries())
      if (!contains(s.with(d, l - 1))) return false;
  return true;
}

MultiIndex IndexSet::bounding_box() const {
  MultiIndex box;
  for (const auto& s : members_)
    for (const auto& [d, l] : s.entries())
      if (l > box.get(d)) box.set(d, l);
  return box;
}

namespace {

struct LambdaBuilder {
  const WeightConfig& cfg;
  double threshold;
  int dim_budget;
  std::size_t cap;
  std::vector<MultiIndex> out;

  void visit(const MultiIndex& s, double sigma_s, int start_dim) {
    out.push_back(s);
    if (out.size() > cap)
      fail(ErrorKind::BudgetExceeded, "index set exceeds member cap of " + std::to_string(cap));
    for (int j = start_dim; j <= dim_budget; ++j) {
      double prev = sigma_s;
      for (int k = 1;; ++k) {
        MultiIndex t = s.with(j, k);
        const double st = sigma(t, cfg);
        if (st < prev) fail(ErrorKind::InvalidWeight, "sigma decreases from " + s.to_string() + " to " + t.to_string());
        if (st > threshold) break;
        visit(t, st, j + 1);
        prev = st;
      }
    }
  }
};

std::vector<std::pair<double, MultiIndex>> sigma_sorted(const IndexSet& set, const WeightConfig& cfg) {
  std::vector<std::pair<double, MultiIndex>> keyed;
  keyed.reserve(set.size());
  for (const auto& s : set) keyed.emplace_back(sigma(s, cfg), s);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return graded_lex_less(x.second, y.second);
  });
  return keyed;
}

constexpr double kThresholdGrowth = 1.5;

}  // namespace

IndexSet build_Lambda_sigma(double sigma_threshold, const WeightConfig& cfg, int dim_budget, std::size_t member_cap) {
  if (dim_budget < 0) fail(ErrorKind::InvalidParameter, "negative dimension budget");
  cfg.validate(dim_budget);
  const MultiIndex zero;
  const double s0 = sigma(zero, cfg);
  if (s0 > sigma_threshold) return IndexSet({}, 0.0);
  LambdaBuilder builder{cfg, sigma_threshold, dim_budget, member_cap, {}};
  builder.visit(zero, s0, 1);
  return IndexSet(std::move(builder.out), std::pow(sigma_threshold, cfg.q));
}

IndexSet build_Lambda(double xi, const WeightConfig& cfg, int dim_budget, std::size_t member_cap) {
  if (!(xi > 1.0)) fail(ErrorKind::InvalidParameter, "xi must exceed 1");
  IndexSet set = build_Lambda_sigma(std::pow(xi, 1.0 / cfg.q), cfg, dim_budget, member_cap);
  return IndexSet(std::vector<MultiIndex>(set.members()), xi);
}

std::uint64_t point_cost(const MultiIndex& s) {
  std::uint64_t c = 1;
  for (const auto& e : s.entries()) c *= static_cast<std::uint64_t>(2 * e.second + 1);
  return c;
}

std::uint64_t grid_cardinality(const IndexSet& set) {
  std::uint64_t total = 0;
  for (const auto& s : set) total += point_cost(s);
  return total;
}

BudgetChoice choose_xi_for_budget(std::uint64_t n, const WeightConfig& cfg, BudgetMode mode, int dim_budget,
                                  std::size_t member_cap) {
  if (n < 1) fail(ErrorKind::InvalidParameter, "budget must be at least 1");
  cfg.validate(dim_budget);
  auto cost_of = [&](const MultiIndex& s) { return mode == BudgetMode::Points ? point_cost(s) : std::uint64_t{1}; };
  auto total_cost = [&](const IndexSet& set) {
    std::uint64_t t = 0;
    for (const auto& s : set) t += cost_of(s);
    return t;
  };

  double threshold = sigma(MultiIndex{}, cfg);
  IndexSet enumerated = build_Lambda_sigma(threshold, cfg, dim_budget, member_cap);
  // Grow until the enumerated set overshoots the budget (or no further
  // dimension can be explored); the optimal prefix then lies inside it.
  std::size_t stagnant = 0;
  while (total_cost(enumerated) <= n && stagnant < 64) {
    threshold *= kThresholdGrowth;
    IndexSet next = build_Lambda_sigma(threshold, cfg, dim_budget, member_cap);
    stagnant = next.size() == enumerated.size() ? stagnant + 1 : 0;
    enumerated = std::move(next);
  }

  const auto keyed = sigma_sorted(enumerated, cfg);
  std::vector<MultiIndex> chosen;
  std::uint64_t spent = 0;
  double last_sigma = sigma(MultiIndex{}, cfg);
  for (const auto& [sg, s] : keyed) {
    const std::uint64_t c = cost_of(s);
    if (spent + c > n) break;
    spent += c;
    chosen.push_back(s);
    last_sigma = sg;
  }
  const double xi = std::max(std::pow(last_sigma, cfg.q), 1.0);
  return {xi, IndexSet(std::move(chosen), xi)};
}

std::vector<MultiIndex> order_indices(const WeightConfig& cfg, std::size_t count, int dim_budget,
                                      std::size_t member_cap) {
  if (count < 1) fail(ErrorKind::InvalidParameter, "count must be at least 1");
  cfg.validate(dim_budget);
  double threshold = sigma(MultiIndex{}, cfg);
  IndexSet enumerated = build_Lambda_sigma(threshold, cfg, dim_budget, member_cap);
  std::size_t stagnant = 0;
  while (enumerated.size() < count) {
    threshold *= kThresholdGrowth;
    IndexSet next = build_Lambda_sigma(threshold, cfg, dim_budget, member_cap);
    stagnant = next.size() == enumerated.size() ? stagnant + 1 : 0;
    if (stagnant > 64) fail(ErrorKind::BudgetExceeded, "cannot enumerate enough indices");
    enumerated = std::move(next);
  }
  const auto keyed = sigma_sorted(enumerated, cfg);
  std::vector<MultiIndex> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(keyed[i].second);
  return out;
}

}  // namespace gpwpc
