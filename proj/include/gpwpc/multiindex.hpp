#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gpwpc {

/// Finitely supported sequence s = (s_j)_{j>=1} of non-negative integers,
/// stored as sorted (j, s_j) pairs with s_j >= 1.
class MultiIndex {
public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<std::pair<int, int>> entries);

  static MultiIndex unit(int dim, int level = 1);
  static MultiIndex from_dense(std::span<const int> levels);

  int get(int dim) const noexcept;
  void set(int dim, int level);
  MultiIndex with(int dim, int level) const;

  const std::vector<std::pair<int, int>>& entries() const noexcept { return entries_; }
  std::vector<int> support() const;
  bool is_zero() const noexcept { return entries_.empty(); }
  int max_dim() const noexcept { return entries_.empty() ? 0 : entries_.back().first; }

  int l1() const noexcept;
  int l0() const noexcept { return static_cast<int>(entries_.size()); }
  int linf() const noexcept;

  /// Half-order: s <= t iff s_j <= t_j for every j.
  bool is_le(const MultiIndex& other) const noexcept;

  std::string to_string() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

private:
  std::vector<std::pair<int, int>> entries_;
};

/// Graded lexicographic order: smaller |s|_1 first; among equal |s|_1, the
/// index with the larger level in the lowest differing dimension first.
bool graded_lex_less(const MultiIndex& lhs, const MultiIndex& rhs) noexcept;

/// A pair (δ, s) with sign map keys equal to the support of s. Signs are
/// aligned with s.entries() and take the values -1 and +1 (the factor
/// L_{δ_j,s_j}(y_j)) or 0, allowed only where s_j = 1, standing for the odd
/// factor sgn(y_j). Without the odd factor the family misses every direction
/// (L_{+,0} - L_{-,0}) and is not complete in L2(R^∞; λ_a).
class SignedMultiIndex {
public:
  SignedMultiIndex() = default;
  SignedMultiIndex(MultiIndex base, std::vector<int> signs);

  const MultiIndex& base() const noexcept { return base_; }
  const std::vector<int>& signs() const noexcept { return signs_; }
  int sign(int dim) const;

  /// ν_{δ,s} = ∏_{j∈J_δ} s_j.
  std::int64_t nu() const noexcept;

  /// All sign decorations of s in lexicographic sign order (-1, 0, +1): two
  /// per dimension with s_j >= 2, three per dimension with s_j = 1.
  static std::vector<SignedMultiIndex> decorations(const MultiIndex& s);

  std::string to_string() const;

  friend bool operator==(const SignedMultiIndex&, const SignedMultiIndex&) = default;
  friend auto operator<=>(const SignedMultiIndex&, const SignedMultiIndex&) = default;

private:
  MultiIndex base_;
  std::vector<int> signs_;
};

enum class WeightFamily {
  Rho,  ///< per-dimension factor c_dim s_j^{-r} Σ_{ℓ=1}^{2r} ρ_j^{-ℓ}
  B,    ///< per-dimension factor c_dim s_j^{-r} e b_j scaling
};

/// Product-form sparsity weights β_s and σ_s = β_s^{p/2-1}.
struct WeightConfig {
  double p = 0.5;
  double q = 2.0 / 3.0;  ///< always 2p / (2 - p)
  int r = 3;
  double theta = 0.0;
  double lambda = 0.0;
  WeightFamily family = WeightFamily::Rho;
  std::vector<double> rho;  ///< ρ_j for j = 1..rho.size()
  std::vector<double> b;    ///< b_j for the B family
  double b_scaling = 1.0;
  double c_dim = 1.0;
  double c_global = 1.0;

  /// Sets p and recomputes q.
  void set_p(double new_p);
  /// Smallest integer r with p r > 1.
  static int default_r(double p);

  int dims() const noexcept;
  /// β factor contributed by dimension j at level >= 1.
  double dim_factor(int dim, int level) const;
  double dim_factor_sum(int dim) const;

  /// Parameter checks plus a probe of σ-monotonicity along the half-order on
  /// dimensions 1..dim_budget. Throws InvalidParameter / InvalidWeight.
  void validate(int dim_budget) const;
};

/// ρ_j = η b_j^{σ_ρ - 1} / Σ_k b_k^{σ_ρ}, so that Σ_j ρ_j b_j = η.
std::vector<double> rho_family(std::span<const double> b, double eta = 1.5, double sigma_rho = 0.5);

/// Largest c_dim <= 1 keeping every level-one factor at most 1, which is what
/// σ-monotonicity along the half-order requires.
double monotone_c_dim(const WeightConfig& cfg, int dim_budget);

/// Built-in ρ-family configuration for the given b_j with r = default_r(p)
/// and c_dim = monotone_c_dim.
WeightConfig default_weights(std::span<const double> b, double p = 0.5, double eta = 1.5, double sigma_rho = 0.5);

double p_weight(const MultiIndex& s, double theta, double lambda);
double beta(const MultiIndex& s, const WeightConfig& cfg);
double sigma(const MultiIndex& s, const WeightConfig& cfg);

inline constexpr std::size_t kDefaultMemberCap = 1'000'000;

/// Downward-closed finite index set in graded lexicographic order.
class IndexSet {
public:
  IndexSet() = default;
  /// Sorts members; does not check downward closure.
  explicit IndexSet(std::vector<MultiIndex> members, double xi = 0.0);

  const std::vector<MultiIndex>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  double xi() const noexcept { return xi_; }
  bool contains(const MultiIndex& s) const;
  bool is_downward_closed() const;
  /// Maximum level used per dimension (the smallest box containing the set).
  MultiIndex bounding_box() const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

private:
  std::vector<MultiIndex> members_;
  double xi_ = 0.0;
};

/// {s : σ_s <= threshold, J_s ⊆ [1..dim_budget]} by depth-first enumeration
/// with monotone pruning.
IndexSet build_Lambda_sigma(double sigma_threshold, const WeightConfig& cfg, int dim_budget,
                            std::size_t member_cap = kDefaultMemberCap);
/// Λ(ξ) = {s : σ_s <= ξ^{1/q}}.
IndexSet build_Lambda(double xi, const WeightConfig& cfg, int dim_budget, std::size_t member_cap = kDefaultMemberCap);

/// Σ_{s∈Λ} ∏_j (2 s_j + 1).
std::uint64_t grid_cardinality(const IndexSet& set);
std::uint64_t point_cost(const MultiIndex& s);

enum class BudgetMode { Points, Terms };

struct BudgetChoice {
  double xi = 1.0;
  IndexSet set;
};

/// Largest prefix of the σ order (ties graded lexicographic) whose cost
/// respects the budget n. Prefixes of that order are downward closed and
/// nested in n; away from σ ties the prefix equals Λ(ξ) for the returned ξ.
BudgetChoice choose_xi_for_budget(std::uint64_t n, const WeightConfig& cfg, BudgetMode mode, int dim_budget,
                                  std::size_t member_cap = kDefaultMemberCap);

/// The first `count` indices of F (restricted to dimensions 1..dim_budget)
/// sorted by σ nondecreasing, ties graded lexicographic.
std::vector<MultiIndex> order_indices(const WeightConfig& cfg, std::size_t count, int dim_budget,
                                      std::size_t member_cap = kDefaultMemberCap);

}  // namespace gpwpc
