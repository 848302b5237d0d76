#include "gpwpc/study.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "gpwpc/batch_solve.hpp"
#include "gpwpc/error.hpp"
#include "gpwpc/gpc_analysis.hpp"
#include "gpwpc/sparse_grid.hpp"
#include "gpwpc/stats.hpp"

namespace gpwpc {

using nlohmann::json;

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::Truncation: return "truncation";
    case Method::Interp: return "interp";
    case Method::Quad: return "quad";
    case Method::Ls: return "ls";
    case Method::LsQuad: return "ls-quad";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "truncation") return Method::Truncation;
  if (s == "interp") return Method::Interp;
  if (s == "quad") return Method::Quad;
  if (s == "ls") return Method::Ls;
  if (s == "ls-quad") return Method::LsQuad;
  fail(ErrorKind::Config, "unknown method '" + s + "'");
}

void StudyConfig::validate() const {
  try {
    field.validate();
    mesh.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  if (budgets.empty()) fail(ErrorKind::Config, "at least one budget required");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1) fail(ErrorKind::Config, "budgets must be positive");
    if (i > 0 && budgets[i] <= budgets[i - 1]) fail(ErrorKind::Config, "budgets must be strictly increasing");
  }
  if (mc_samples < 100) fail(ErrorKind::Config, "mc_samples must be at least 100");
  if (reference_samples < 100) fail(ErrorKind::Config, "reference_samples must be at least 100");
  if (mc_samples > kMaxSamples || reference_samples > kMaxSamples)
    fail(ErrorKind::Config, "sample counts are limited to " + std::to_string(kMaxSamples));
  if (format != "csv" && format != "json") fail(ErrorKind::Config, "format must be csv or json");
  if (!(kappa >= 1.0)) fail(ErrorKind::Config, "kappa must be at least 1");
  if (!(p > 0.0 && p < 2.0)) fail(ErrorKind::Config, "p must lie in (0, 2)");
  if (r < 0) fail(ErrorKind::Config, "r must be non-negative (0 selects the default)");
  if (quad_margin < 0) fail(ErrorKind::Config, "quad_margin must be non-negative");
}

WeightConfig StudyConfig::weights() const {
  FieldSpec nominal = field;
  nominal.frozen.clear();
  const std::vector<double> b = nominal.b();
  WeightConfig w;
  w.set_p(p);
  w.r = r > 0 ? r : WeightConfig::default_r(p);
  w.theta = theta;
  w.lambda = lambda;
  w.family = family;
  w.rho = rho_family(b, eta, sigma_rho);
  w.b = b;
  w.b_scaling = b_scaling;
  w.c_global = c_global;
  w.c_dim = c_dim ? *c_dim : monotone_c_dim(w, field.dims);
  return w;
}

ParametricProblem StudyConfig::problem() const { return ParametricProblem(field, mesh, Load::constant_load(load)); }

json to_json(const StudyConfig& cfg) {
  json functional;
  switch (cfg.functional.kind) {
    case Functional::Kind::Mean: functional = {{"kind", "mean"}}; break;
    case Functional::Kind::PointEval: functional = {{"kind", "point"}, {"x0", cfg.functional.x0}}; break;
    case Functional::Kind::Dual: functional = {{"kind", "dual"}, {"vector", cfg.functional.dual}}; break;
  }
  json weights = {{"p", cfg.p},
                  {"r", cfg.r},
                  {"eta", cfg.eta},
                  {"sigma_rho", cfg.sigma_rho},
                  {"family", cfg.family == WeightFamily::Rho ? "rho" : "b"},
                  {"b_scaling", cfg.b_scaling},
                  {"c_global", cfg.c_global},
                  {"theta", cfg.theta},
                  {"lambda", cfg.lambda}};
  if (cfg.c_dim)
    weights["c_dim"] = *cfg.c_dim;
  else
    weights["c_dim"] = "auto";
  return {{"dims", cfg.field.dims},
          {"theta0", cfg.field.theta0},
          {"tau", cfg.field.tau},
          {"a", cfg.field.measure.a},
          {"family", cfg.field.family == FieldFamily::Sine ? "sine" : "affine-toy"},
          {"frozen", cfg.field.frozen},
          {"cells", cfg.mesh.cells},
          {"load", cfg.load},
          {"functional", functional},
          {"target", cfg.target == QuadTarget::Solution ? "solution" : "functional"},
          {"weights", weights},
          {"method", to_string(cfg.method)},
          {"budgets", cfg.budgets},
          {"mc_samples", cfg.mc_samples},
          {"reference_samples", cfg.reference_samples},
          {"seed", cfg.seed},
          {"kappa", cfg.kappa},
          {"mode", cfg.mode == SamplingMode::Plain ? "plain" : "christoffel"},
          {"quad_margin", cfg.quad_margin},
          {"timing", cfg.timing},
          {"out", cfg.out},
          {"format", cfg.format}};
}

StudyConfig config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "configuration must be a JSON object");
  StudyConfig cfg;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "dims") cfg.field.dims = v.get<int>();
      else if (key == "theta0") cfg.field.theta0 = v.get<double>();
      else if (key == "tau") cfg.field.tau = v.get<double>();
      else if (key == "a") cfg.field.measure.a = v.get<double>();
      else if (key == "family") {
        const auto s = v.get<std::string>();
        if (s == "sine") cfg.field.family = FieldFamily::Sine;
        else if (s == "affine-toy") cfg.field.family = FieldFamily::AffineToy;
        else fail(ErrorKind::Config, "unknown field family '" + s + "'");
      } else if (key == "frozen") cfg.field.frozen = v.get<std::vector<int>>();
      else if (key == "cells") cfg.mesh.cells = v.get<int>();
      else if (key == "load") cfg.load = v.get<double>();
      else if (key == "functional") {
        const auto kind = v.at("kind").get<std::string>();
        if (kind == "mean") cfg.functional = Functional::mean();
        else if (kind == "point") cfg.functional = Functional::point_eval(v.at("x0").get<double>());
        else if (kind == "dual") cfg.functional = Functional::dual_vector(v.at("vector").get<std::vector<double>>());
        else fail(ErrorKind::Config, "unknown functional kind '" + kind + "'");
      } else if (key == "target") {
        const auto s = v.get<std::string>();
        if (s == "solution") cfg.target = QuadTarget::Solution;
        else if (s == "functional") cfg.target = QuadTarget::Functional;
        else fail(ErrorKind::Config, "unknown target '" + s + "'");
      } else if (key == "weights") {
        for (const auto& [wk, wv] : v.items()) {
          if (wk == "p") cfg.p = wv.get<double>();
          else if (wk == "r") cfg.r = wv.get<int>();
          else if (wk == "eta") cfg.eta = wv.get<double>();
          else if (wk == "sigma_rho") cfg.sigma_rho = wv.get<double>();
          else if (wk == "family") {
            const auto s = wv.get<std::string>();
            if (s == "rho") cfg.family = WeightFamily::Rho;
            else if (s == "b") cfg.family = WeightFamily::B;
            else fail(ErrorKind::Config, "unknown weight family '" + s + "'");
          } else if (wk == "b_scaling") cfg.b_scaling = wv.get<double>();
          else if (wk == "c_global") cfg.c_global = wv.get<double>();
          else if (wk == "theta") cfg.theta = wv.get<double>();
          else if (wk == "lambda") cfg.lambda = wv.get<double>();
          else if (wk == "c_dim") {
            if (wv.is_string() && wv.get<std::string>() == "auto") cfg.c_dim.reset();
            else cfg.c_dim = wv.get<double>();
          } else fail(ErrorKind::Config, "unknown weights key '" + wk + "'");
        }
      } else if (key == "method") cfg.method = method_from_string(v.get<std::string>());
      else if (key == "budgets") cfg.budgets = v.get<std::vector<std::uint64_t>>();
      else if (key == "mc_samples") cfg.mc_samples = v.get<std::size_t>();
      else if (key == "reference_samples") cfg.reference_samples = v.get<std::size_t>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "kappa") cfg.kappa = v.get<double>();
      else if (key == "mode") {
        const auto s = v.get<std::string>();
        if (s == "plain") cfg.mode = SamplingMode::Plain;
        else if (s == "christoffel") cfg.mode = SamplingMode::Christoffel;
        else fail(ErrorKind::Config, "unknown sampling mode '" + s + "'");
      } else if (key == "quad_margin") cfg.quad_margin = v.get<int>();
      else if (key == "timing") cfg.timing = v.get<bool>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "format") cfg.format = v.get<std::string>();
      else fail(ErrorKind::Config, "unknown configuration key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, e.what());
  }
  return cfg;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open configuration file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  return config_from_json(j);
}

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const StudyConfig& cfg) {
  json j = to_json(cfg);
  j.erase("out");
  j.erase("format");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(j.dump()));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Mean of the solution (or of the functional) over a large sample, with the
// standard error measured in the same norm.
struct ReferenceIntegral {
  FemSolution mean;
  double scalar = 0.0;
  double se = 0.0;
};

ReferenceIntegral reference_integral(const StudyConfig& cfg, const ParametricProblem& problem) {
  const std::size_t total = cfg.reference_samples;
  const std::vector<ParamPoint> pts =
      sample_points(cfg.field.dims, cfg.field.measure.a, RandomStream{cfg.seed, 2}, total);
  constexpr std::size_t kChunk = 4096;
  FemSolution sum(cfg.mesh.cells);
  double scalar_sum = 0.0, scalar_sq = 0.0;
  std::vector<FemSolution> all;
  all.reserve(total);
  for (std::size_t start = 0; start < total; start += kChunk) {
    const std::size_t end = std::min(total, start + kChunk);
    auto sols = solve_batch(problem, std::span<const ParamPoint>(pts).subspan(start, end - start));
    for (auto& s : sols) {
      sum += s;
      const double f = apply_functional(cfg.functional, s);
      scalar_sum += f;
      scalar_sq += f * f;
      all.push_back(std::move(s));
    }
  }
  const double n = static_cast<double>(total);
  ReferenceIntegral ref;
  ref.mean = (1.0 / n) * sum;
  ref.scalar = scalar_sum / n;
  if (cfg.target == QuadTarget::Solution) {
    double ss = 0.0;
    for (const auto& s : all) {
      const double d = v_norm(s - ref.mean);
      ss += d * d;
    }
    ref.se = std::sqrt(ss / (n * (n - 1.0)));
  } else {
    const double var = std::max(0.0, (scalar_sq - n * ref.scalar * ref.scalar) / (n - 1.0));
    ref.se = std::sqrt(var / n);
  }
  return ref;
}

double quad_error(const StudyConfig& cfg, const ReferenceIntegral& ref, const FemSolution& value) {
  if (cfg.target == QuadTarget::Solution) return v_norm(value - ref.mean);
  return std::abs(apply_functional(cfg.functional, value) - ref.scalar);
}

}  // namespace

std::vector<StudyRecord> run_study(const StudyConfig& cfg) {
  cfg.validate();
  const ParametricProblem problem = cfg.problem();
  const WeightConfig w = cfg.weights();
  const int dims = cfg.field.dims;
  const double a = cfg.field.measure.a;
  const std::string hash = config_hash(cfg);
  const bool needs_mc = cfg.method == Method::Truncation || cfg.method == Method::Interp || cfg.method == Method::Ls;
  const bool needs_ref = cfg.method == Method::Quad || cfg.method == Method::LsQuad;

  // Refuse budgets whose grid or design would not fit in memory before any solve.
  for (const std::uint64_t n : cfg.budgets) {
    const auto over = [&](const std::string& what) {
      fail(ErrorKind::BudgetExceeded, "budget n=" + std::to_string(n) + ": " + what);
    };
    if ((cfg.method == Method::Interp || cfg.method == Method::Quad) && n > kMaxGridPoints)
      over("more than " + std::to_string(kMaxGridPoints) + " grid points");
    if ((cfg.method == Method::Ls || cfg.method == Method::LsQuad) &&
        static_cast<double>(n) * static_cast<double>(ls_basis_size(n, cfg.kappa)) > static_cast<double>(kMaxDesignEntries))
      over("design matrix above " + std::to_string(kMaxDesignEntries) + " entries");
    if (cfg.method == Method::Truncation && n > kMaxTruncationTerms)
      over("more than " + std::to_string(kMaxTruncationTerms) + " terms");
  }

  McReference mc;
  if (needs_mc) mc = make_mc_reference(problem, RandomStream{cfg.seed, 1}, cfg.mc_samples);
  ReferenceIntegral ref;
  if (needs_ref) ref = reference_integral(cfg, problem);

  std::optional<CoefficientTable> table;
  if (cfg.method == Method::Truncation) {
    try {
      const BudgetChoice largest = choose_xi_for_budget(cfg.budgets.back(), w, BudgetMode::Terms, dims);
      table = compute_coefficients(problem, largest.set.bounding_box(), cfg.quad_margin);
    } catch (const Error& e) {
      throw Error(e.kind(), "budget n=" + std::to_string(cfg.budgets.back()) + ": " + e.what());
    }
  }

  std::vector<StudyRecord> out;
  for (const std::uint64_t n : cfg.budgets) {
    const auto start = std::chrono::steady_clock::now();
    StudyRecord rec;
    rec.method = to_string(cfg.method);
    rec.n = n;
    rec.config_hash = hash;
    try {
      switch (cfg.method) {
        case Method::Truncation: {
          const BudgetChoice choice = choose_xi_for_budget(n, w, BudgetMode::Terms, dims);
          const TruncatedExpansion s_lambda = truncate_S_Lambda(*table, choice.set);
          const McEstimate e = sqrt_estimate(mc_sq_error(mc, [&](const ParamPoint& y) { return s_lambda(y); }));
          std::uint64_t solves = 1;
          for (int j = 1; j <= dims; ++j) solves *= 2 * static_cast<std::uint64_t>(table->box().get(j) + cfg.quad_margin);
          rec.cost = solves;
          rec.error = e.value;
          rec.error_se = e.std_error;
          rec.param = choice.xi;
          break;
        }
        case Method::Interp:
        case Method::Quad: {
          const BudgetChoice choice = choose_xi_for_budget(n, w, BudgetMode::Points, dims);
          auto grid = std::make_shared<const SparseGrid>(build_grid(choice.set, a));
          std::vector<FemSolution> payloads = solve_batch(problem, grid->points);
          rec.cost = grid->points.size();
          rec.param = choice.xi;
          if (cfg.method == Method::Interp) {
            const SparseInterpolant<FemSolution> interp(grid, std::move(payloads));
            const McEstimate e = sqrt_estimate(mc_sq_error(mc, [&](const ParamPoint& y) { return interp(y); }));
            rec.error = e.value;
            rec.error_se = e.std_error;
          } else {
            const SparseQuadrature q = sparse_quadrature(*grid);
            const FemSolution value = q.apply_values<FemSolution>(payloads);
            rec.error = quad_error(cfg, ref, value);
            rec.error_se = ref.se;
          }
          break;
        }
        case Method::Ls:
        case Method::LsQuad: {
          const LSDesign design = draw_design(w, dims, a, n, cfg.kappa, cfg.mode, RandomStream{cfg.seed, 1000 + n});
          const std::vector<FemSolution> samples = solve_batch(problem, design.samples);
          rec.cost = design.samples.size();
          rec.param = static_cast<double>(design.m);
          if (cfg.method == Method::Ls) {
            const std::vector<FemSolution> coeffs = fit_bochner(design, samples);
            const McEstimate e = sqrt_estimate(
                mc_sq_error(mc, [&](const ParamPoint& y) { return eval_expansion(design, coeffs, y); }));
            rec.error = e.value;
            rec.error_se = e.std_error;
          } else {
            const LSQuadrature q = ls_quadrature(design);
            const FemSolution value = q.apply_values<FemSolution>(samples);
            rec.error = quad_error(cfg, ref, value);
            rec.error_se = ref.se;
          }
          break;
        }
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "budget n=" + std::to_string(n) + ": " + e.what());
    }
    if (cfg.timing)
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(rec));
  }
  return out;
}

RateFit fit_rate(const std::vector<StudyRecord>& records) {
  std::vector<double> lx, ly;
  RateFit fit;
  for (const auto& r : records) {
    if (!(r.error > 0.0) || r.n == 0) {
      std::cerr << "warning: record n=" << r.n << " has nonpositive error, excluded from the rate fit\n";
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(static_cast<double>(r.n)));
    ly.push_back(std::log(r.error));
  }
  if (lx.size() < 3) fail(ErrorKind::InsufficientData, "rate fit needs at least 3 records with positive error");
  const LineFit f = fit_line(lx, ly);
  fit.slope = -f.slope;
  fit.intercept = f.intercept;
  fit.r2 = f.r2;
  fit.used = lx.size();
  return fit;
}

std::string records_to_csv(const std::vector<StudyRecord>& records) {
  std::ostringstream os;
  os << "method,n,cost,error,error_se,param,wall_ms,config_hash\n";
  for (const auto& r : records)
    os << r.method << ',' << r.n << ',' << r.cost << ',' << format_double(r.error) << ','
       << format_double(r.error_se) << ',' << format_double(r.param) << ',' << format_double(r.wall_ms) << ','
       << r.config_hash << '\n';
  return os.str();
}

json records_to_json(const std::vector<StudyRecord>& records, const StudyConfig& cfg) {
  json arr = json::array();
  for (const auto& r : records)
    arr.push_back({{"method", r.method},
                   {"n", r.n},
                   {"cost", r.cost},
                   {"error", r.error},
                   {"error_se", r.error_se},
                   {"param", r.param},
                   {"wall_ms", r.wall_ms},
                   {"config_hash", r.config_hash}});
  return {{"config", to_json(cfg)}, {"config_hash", config_hash(cfg)}, {"records", arr}};
}

std::vector<StudyRecord> records_from_json(const json& j) {
  std::vector<StudyRecord> out;
  try {
    for (const auto& r : j.at("records")) {
      StudyRecord rec;
      rec.method = r.at("method").get<std::string>();
      rec.n = r.at("n").get<std::uint64_t>();
      rec.cost = r.at("cost").get<std::uint64_t>();
      rec.error = r.at("error").get<double>();
      rec.error_se = r.at("error_se").get<double>();
      rec.param = r.at("param").get<double>();
      rec.wall_ms = r.at("wall_ms").get<double>();
      rec.config_hash = r.at("config_hash").get<std::string>();
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed record file: ") + e.what());
  }
  return out;
}

std::vector<StudyRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "method,n,cost,error,error_se,param,wall_ms,config_hash")
    fail(ErrorKind::Config, "CSV header does not match the record layout");
  std::vector<StudyRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) fail(ErrorKind::Config, "CSV row with " + std::to_string(f.size()) + " fields");
    // strtod rather than stod: stod rejects subnormals that %.17g happily writes
    auto num = [&](const std::string& cell) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) fail(ErrorKind::Config, "unparsable CSV row: " + line);
      return v;
    };
    auto count = [&](const std::string& cell) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(cell.c_str(), &end, 10);
      if (cell.empty() || cell[0] == '-' || end != cell.c_str() + cell.size())
        fail(ErrorKind::Config, "unparsable CSV row: " + line);
      return static_cast<std::uint64_t>(v);
    };
    out.push_back({f[0], count(f[1]), count(f[2]), num(f[3]), num(f[4]), num(f[5]), num(f[6]), f[7]});
  }
  return out;
}

void emit(const std::vector<StudyRecord>& records, const StudyConfig& cfg, const std::string& path,
          const std::string& format) {
  std::string body;
  if (format == "csv")
    body = records_to_csv(records);
  else if (format == "json")
    body = records_to_json(records, cfg).dump(2) + "\n";
  else
    fail(ErrorKind::Config, "format must be csv or json");
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << body;
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

}  // namespace gpwpc
