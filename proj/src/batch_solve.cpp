#include "gpwpc/batch_solve.hpp"

#include <cstdint>
#include <exception>

namespace gpwpc {

std::vector<FemSolution> solve_batch(const ParametricProblem& problem, std::span<const ParamPoint> points) {
  const auto n = static_cast<std::int64_t>(points.size());
  std::vector<FemSolution> out(points.size());
  std::vector<std::exception_ptr> errors(points.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = problem.solve(points[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<FemSolution> solve_batch_serial(const ParametricProblem& problem, std::span<const ParamPoint> points) {
  std::vector<FemSolution> out;
  out.reserve(points.size());
  for (const auto& y : points) out.push_back(problem.solve(y));
  return out;
}

}  // namespace gpwpc
