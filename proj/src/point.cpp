#include "gpwpc/point.hpp"

#include <algorithm>
#include <string>

#include "gpwpc/error.hpp"

namespace gpwpc {

ParamPoint ParamPoint::from_dense(const std::vector<double>& dense) {
  ParamPoint p;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) p.entries_.emplace_back(static_cast<int>(i) + 1, dense[i]);
  return p;
}

double ParamPoint::get(int dim) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), dim,
                             [](const auto& e, int d) { return e.first < d; });
  return (it != entries_.end() && it->first == dim) ? it->second : 0.0;
}

void ParamPoint::set(int dim, double value) {
  if (dim < 1) fail(ErrorKind::InvalidParameter, "parameter dimensions start at 1");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), dim,
                             [](const auto& e, int d) { return e.first < d; });
  const bool present = it != entries_.end() && it->first == dim;
  if (value == 0.0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = value;
  } else {
    entries_.insert(it, {dim, value});
  }
}

std::vector<double> ParamPoint::to_dense(int dims) const {
  if (max_dim() > dims)
    fail(ErrorKind::InvalidParameter,
         "parameter support reaches dimension " + std::to_string(max_dim()) + " beyond " + std::to_string(dims));
  std::vector<double> dense(static_cast<std::size_t>(dims), 0.0);
  for (const auto& [d, v] : entries_) dense[static_cast<std::size_t>(d) - 1] = v;
  return dense;
}

}  // namespace gpwpc
