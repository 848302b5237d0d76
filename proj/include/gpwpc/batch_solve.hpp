#pragma once

#include <span>
#include <vector>

#include "gpwpc/pde_model.hpp"

namespace gpwpc {

/// Solves the problem at every point. Points are distributed over OpenMP
/// threads; the result order follows the input order. When solves fail, the
/// error raised at the lowest point index is rethrown.
std::vector<FemSolution> solve_batch(const ParametricProblem& problem, std::span<const ParamPoint> points);

/// Single-threaded reference with identical results.
std::vector<FemSolution> solve_batch_serial(const ParametricProblem& problem, std::span<const ParamPoint> points);

}  // namespace gpwpc
