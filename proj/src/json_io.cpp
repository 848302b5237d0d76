#include "gpwpc/json_io.hpp"

#include <string>

#include "gpwpc/error.hpp"

namespace gpwpc {

using nlohmann::json;

json to_json(const MultiIndex& s) {
  json j = json::object();
  for (const auto& [d, l] : s.entries()) j[std::to_string(d)] = l;
  return j;
}

MultiIndex multi_index_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "multi-index must be a {dim: level} object");
  MultiIndex s;
  for (const auto& [k, v] : j.items()) s.set(std::stoi(k), v.get<int>());
  return s;
}

json to_json(const ParamPoint& y) {
  json j = json::object();
  for (const auto& [d, v] : y.entries()) j[std::to_string(d)] = v;
  return j;
}

ParamPoint point_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "point must be a {dim: value} object");
  ParamPoint y;
  for (const auto& [k, v] : j.items()) y.set(std::stoi(k), v.get<double>());
  return y;
}

json to_json(const SignedMultiIndex& s) {
  json signs = json::object();
  const auto& e = s.base().entries();
  for (std::size_t i = 0; i < e.size(); ++i) signs[std::to_string(e[i].first)] = s.signs()[i];
  return {{"s", to_json(s.base())}, {"delta", signs}};
}

json to_json(const WeightConfig& cfg) {
  return {{"p", cfg.p},
          {"q", cfg.q},
          {"r", cfg.r},
          {"theta", cfg.theta},
          {"lambda", cfg.lambda},
          {"family", cfg.family == WeightFamily::Rho ? "rho" : "b"},
          {"rho", cfg.rho},
          {"b", cfg.b},
          {"b_scaling", cfg.b_scaling},
          {"c_dim", cfg.c_dim},
          {"c_global", cfg.c_global}};
}

json to_json(const IndexSet& set, const WeightConfig& cfg) {
  json members = json::array();
  for (const auto& s : set) members.push_back(to_json(s));
  return {{"xi", set.xi()}, {"members", members}, {"weights", to_json(cfg)}};
}

IndexSet index_set_from_json(const json& j) {
  std::vector<MultiIndex> members;
  for (const auto& m : j.at("members")) members.push_back(multi_index_from_json(m));
  return IndexSet(std::move(members), j.value("xi", 0.0));
}

json to_json(const SparseGrid& grid) {
  json pts = json::array();
  for (const auto& p : grid.points) pts.push_back(to_json(p));
  json atoms = json::array();
  for (const auto& a : grid.atoms) {
    json k = json::object();
    for (const auto& [d, kj] : a.k) k[std::to_string(d)] = kj;
    atoms.push_back({{"s", to_json(a.s)}, {"e", to_json(a.e)}, {"k", k}, {"point", a.point}, {"sign", a.sign}});
  }
  json members = json::array();
  for (const auto& s : grid.set) members.push_back(to_json(s));
  return {{"a", grid.a}, {"members", members}, {"points", pts}, {"atoms", atoms}};
}

json to_json(const SparseQuadrature& q) {
  json pts = json::array();
  for (const auto& p : q.points) pts.push_back(to_json(p));
  return {{"points", pts}, {"weights", q.weights}};
}

json to_json(const LSDesign& design) {
  json basis = json::array();
  for (const auto& b : design.basis) basis.push_back(to_json(b));
  return {{"n", design.n},
          {"m", design.m},
          {"kappa", design.kappa},
          {"mode", design.mode == SamplingMode::Plain ? "plain" : "christoffel"},
          {"seed", design.stream.seed},
          {"substream", design.stream.substream},
          {"a", design.a},
          {"dims", design.dims},
          {"basis", basis},
          {"gram_condition", design.condition},
          {"flagged", design.flagged}};
}

json to_json(const CoefficientTable& table, bool with_nodal) {
  json entries = json::array();
  for (const auto& e : table.entries()) {
    json item = to_json(e.index);
    item["v_norm"] = v_norm(e.value);
    if (with_nodal) item["nodal"] = e.value.values();
    entries.push_back(std::move(item));
  }
  return {{"box", to_json(table.box())}, {"quad_margin", table.quad_margin()}, {"a", table.a()}, {"entries", entries}};
}

}  // namespace gpwpc
