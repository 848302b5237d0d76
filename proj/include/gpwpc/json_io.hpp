#pragma once

#include <json.hpp>

#include "gpwpc/gpc_analysis.hpp"
#include "gpwpc/least_squares.hpp"
#include "gpwpc/multiindex.hpp"
#include "gpwpc/point.hpp"
#include "gpwpc/sparse_grid.hpp"

namespace gpwpc {

/// {"<dim>": level, ...}
nlohmann::json to_json(const MultiIndex& s);
MultiIndex multi_index_from_json(const nlohmann::json& j);
/// {"<dim>": value, ...}
nlohmann::json to_json(const ParamPoint& y);
ParamPoint point_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SignedMultiIndex& s);

nlohmann::json to_json(const WeightConfig& cfg);
/// members, xi and the weight configuration echo.
nlohmann::json to_json(const IndexSet& set, const WeightConfig& cfg);
IndexSet index_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SparseGrid& grid);
nlohmann::json to_json(const SparseQuadrature& q);

/// Seeds, mode, κ and the basis list: enough to redraw the design.
nlohmann::json to_json(const LSDesign& design);

/// index, δ pattern and V-norm per coefficient; nodal vectors when requested.
nlohmann::json to_json(const CoefficientTable& table, bool with_nodal);

}  // namespace gpwpc
