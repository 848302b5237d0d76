#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpwpc/basis_check.hpp"
#include "gpwpc/error.hpp"
#include "gpwpc/gpc_analysis.hpp"
#include "gpwpc/json_io.hpp"
#include "gpwpc/study.hpp"

using namespace gpwpc;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitBudget = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidWeight:
    case ErrorKind::Io:
      return kExitConfig;
    case ErrorKind::BudgetExceeded:
    case ErrorKind::Capacity:
      return kExitBudget;
    default:
      return kExitNumerical;
  }
}

// Flag overrides applied on top of the JSON configuration (or the defaults).
struct Overrides {
  std::string config;
  std::optional<double> a, tau, theta0, p, kappa;
  std::optional<int> dims, cells;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> budgets;
  std::optional<std::string> out, format, mode, method;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON configuration file");
    cmd->add_option("--a", a, "shape parameter of the Laplace law");
    cmd->add_option("--tau", tau, "decay exponent of the field expansion");
    cmd->add_option("--theta0", theta0, "amplitude of the field expansion");
    cmd->add_option("--dims", dims, "number of random dimensions");
    cmd->add_option("--cells", cells, "finite element cells");
    cmd->add_option("--p", p, "summability exponent of the weights");
    cmd->add_option("--budgets", budgets, "increasing budgets")->delimiter(',');
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out", out, "output path (stdout when omitted)");
    cmd->add_option("--format", format, "csv or json");
    cmd->add_option("--kappa", kappa, "oversampling factor n/m");
    cmd->add_option("--mode", mode, "plain or christoffel");
  }

  StudyConfig resolve() const {
    StudyConfig cfg = config.empty() ? StudyConfig{} : load_config(config);
    if (a) cfg.field.measure.a = *a;
    if (tau) cfg.field.tau = *tau;
    if (theta0) cfg.field.theta0 = *theta0;
    if (dims) cfg.field.dims = *dims;
    if (cells) cfg.mesh.cells = *cells;
    if (p) cfg.p = *p;
    if (!budgets.empty()) cfg.budgets = budgets;
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (format) cfg.format = *format;
    if (kappa) cfg.kappa = *kappa;
    if (mode) {
      if (*mode == "plain") cfg.mode = SamplingMode::Plain;
      else if (*mode == "christoffel") cfg.mode = SamplingMode::Christoffel;
      else fail(ErrorKind::Config, "unknown sampling mode '" + *mode + "'");
    }
    if (method) cfg.method = method_from_string(*method);
    return cfg;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_basis_check(const std::vector<double>& as, int degree, double tol) {
  json arr = json::array();
  bool ok = true;
  for (double a : as) {
    const BasisCheck c = basis_check(a, degree);
    ok = ok && c.gram_gamma <= tol && c.gram_piecewise <= tol && c.eigen_residual <= tol &&
         c.gauss_moment_error <= 1e-9;
    arr.push_back(to_json(c));
  }
  std::cout << json{{"checks", arr}, {"pass", ok}}.dump(2) << "\n";
  return ok ? kExitOk : kExitNumerical;
}

int run_coeff_sparsity(const StudyConfig& cfg, int box_level, int margin, const std::vector<double>& p_list,
                       bool nodal) {
  cfg.validate();
  const ParametricProblem problem = cfg.problem();
  MultiIndex box;
  for (int j = 1; j <= cfg.field.dims; ++j) box.set(j, box_level);
  const CoefficientTable table = compute_coefficients(problem, box, margin);
  const McReference mc = make_mc_reference(problem, RandomStream{cfg.seed, 1}, cfg.mc_samples);
  const McEstimate norm = mc_sq_norm(mc);
  const WeightConfig w = cfg.weights();
  const SparsityReport rep = sparsity_report(table, p_list, &w, norm.value);

  json sorted = json::array();
  for (const auto& [s, v] : rep.sorted) sorted.push_back({{"s", to_json(s)}, {"norm", v}});
  json lp = json::array();
  for (const auto& [pp, v] : rep.lp_norms) lp.push_back({{"p", pp}, {"norm", v}});
  json out = {{"config", to_json(cfg)},
              {"config_hash", config_hash(cfg)},
              {"coefficients", to_json(table, nodal)},
              {"sorted", sorted},
              {"lp_norms", lp},
              {"decay_exponent", rep.decay_exponent},
              {"fit_r2", rep.fit_r2},
              {"total_norm_sq", table.total_norm_sq()},
              {"mc_norm_sq", norm.value},
              {"mc_norm_sq_se", norm.std_error}};
  if (rep.parseval_residual) out["parseval_residual"] = *rep.parseval_residual;
  if (rep.weighted_sum) out["weighted_sum"] = *rep.weighted_sum;
  write_text(cfg.out, out.dump(2) + "\n");
  return kExitOk;
}

int run_report(const std::string& path) {
  const std::string text = read_text(path);
  std::vector<StudyRecord> records;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorKind::Config, path + ": " + e.what());
    }
    records = records_from_json(j);
  } else {
    records = records_from_csv(text);
  }
  const RateFit fit = fit_rate(records);
  std::cout << json{{"file", path},
                    {"records", records.size()},
                    {"used", fit.used},
                    {"excluded", fit.excluded},
                    {"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"r2", fit.r2}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laguerre piecewise-polynomial chaos for log-Laplace diffusion"};
  app.require_subcommand(1);

  std::vector<double> check_as{0.5, 1.0, 2.0};
  int check_degree = 20;
  double check_tol = 1e-10;
  auto* basis_cmd = app.add_subcommand("basis-check", "orthonormality, eigenrelation and Gauss moments");
  basis_cmd->add_option("--a", check_as, "shape parameters")->delimiter(',');
  basis_cmd->add_option("--degree", check_degree, "highest degree tested");
  basis_cmd->add_option("--tol", check_tol, "tolerance for Gram and eigen residuals");

  Overrides coeff_ov;
  int box_level = 3, margin = 3;
  std::vector<double> p_list{0.5, 1.0};
  bool nodal = false;
  auto* coeff_cmd = app.add_subcommand("coeff-sparsity", "coefficient table and sparsity diagnostics");
  coeff_ov.attach(coeff_cmd);
  coeff_cmd->add_option("--box", box_level, "level bound per dimension");
  coeff_cmd->add_option("--margin", margin, "extra Gauss points per dimension");
  coeff_cmd->add_option("--p-list", p_list, "exponents for the lp norms")->delimiter(',');
  coeff_cmd->add_flag("--nodal", nodal, "include nodal coefficient vectors");

  Overrides interp_ov, quad_ov, ls_ov;
  auto* interp_cmd = app.add_subcommand("interp-study", "sparse-grid interpolation (or truncation) study");
  interp_ov.attach(interp_cmd);
  interp_cmd->add_option("--method", interp_ov.method, "interp or truncation");
  auto* quad_cmd = app.add_subcommand("quad-study", "sparse-grid quadrature study");
  quad_ov.attach(quad_cmd);
  auto* ls_cmd = app.add_subcommand("ls-study", "weighted least-squares study");
  ls_ov.attach(ls_cmd);
  ls_cmd->add_option("--method", ls_ov.method, "ls or ls-quad");

  std::string report_path;
  auto* report_cmd = app.add_subcommand("report", "fit the convergence rate of a record file");
  report_cmd->add_option("records", report_path, "CSV or JSON record file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*basis_cmd) return run_basis_check(check_as, check_degree, check_tol);
    if (*coeff_cmd) return run_coeff_sparsity(coeff_ov.resolve(), box_level, margin, p_list, nodal);
    if (*report_cmd) return run_report(report_path);

    StudyConfig cfg;
    if (*interp_cmd) {
      cfg = interp_ov.resolve();
      if (!interp_ov.method && cfg.method != Method::Truncation) cfg.method = Method::Interp;
      if (cfg.method != Method::Interp && cfg.method != Method::Truncation)
        fail(ErrorKind::Config, "interp-study runs interp or truncation");
    } else if (*quad_cmd) {
      quad_ov.method = "quad";
      cfg = quad_ov.resolve();
    } else {
      cfg = ls_ov.resolve();
      if (!ls_ov.method && cfg.method != Method::LsQuad) cfg.method = Method::Ls;
      if (cfg.method != Method::Ls && cfg.method != Method::LsQuad)
        fail(ErrorKind::Config, "ls-study runs ls or ls-quad");
    }
    const std::vector<StudyRecord> records = run_study(cfg);
    emit(records, cfg, cfg.out, cfg.format);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
