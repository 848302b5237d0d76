#pragma once

#include <compare>
#include <utility>
#include <vector>

namespace gpwpc {

/// Parameter vector y ∈ R^∞ with finite support: sorted (dimension, value)
/// pairs, dimensions counted from 1, zero coordinates not stored. Equality is
/// exact bit equality of the stored coordinates.
class ParamPoint {
public:
  ParamPoint() = default;

  /// Builds from a dense vector; entry i holds dimension i + 1.
  static ParamPoint from_dense(const std::vector<double>& dense);

  double get(int dim) const noexcept;
  void set(int dim, double value);

  const std::vector<std::pair<int, double>>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  int max_dim() const noexcept { return entries_.empty() ? 0 : entries_.back().first; }

  /// Dense copy over dimensions 1..dims; throws when the support exceeds dims.
  std::vector<double> to_dense(int dims) const;

  friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
  friend auto operator<=>(const ParamPoint&, const ParamPoint&) = default;

private:
  std::vector<std::pair<int, double>> entries_;
};

}  // namespace gpwpc
