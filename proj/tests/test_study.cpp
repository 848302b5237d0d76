#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <random>
#include <set>

#include "gpwpc/error.hpp"
#include "gpwpc/gpc_analysis.hpp"
#include "gpwpc/study.hpp"

using namespace gpwpc;
using nlohmann::json;

namespace {

StudyConfig small(Method m) {
  StudyConfig c;
  c.method = m;
  c.mesh.cells = 32;
  c.mc_samples = 600;
  c.reference_samples = 3000;
  c.budgets = {1, 9, 41};
  return c;
}

void expect_config_error(const StudyConfig& c) {
  try {
    c.validate();
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

std::vector<StudyRecord> power_law(double c, double rate, const std::vector<double>& noise) {
  std::vector<StudyRecord> out;
  std::uint64_t n = 4;
  for (double eps : noise) {
    StudyRecord r;
    r.method = "interp";
    r.n = n;
    r.error = c * std::pow(static_cast<double>(n), -rate) * (1.0 + eps);
    out.push_back(r);
    n *= 3;
  }
  return out;
}

}  // namespace

TEST_CASE("FNV-1a known answers") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("configuration JSON round trip") {
  StudyConfig c = small(Method::Ls);
  c.field.theta0 = 0.45;
  c.field.frozen = {3};
  c.functional = Functional::point_eval(0.25);
  c.target = QuadTarget::Functional;
  c.c_dim = 0.7;
  c.mode = SamplingMode::Christoffel;
  c.seed = 123456789012345ULL;
  const json j = to_json(c);
  const StudyConfig back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(config_hash(back) == config_hash(c));
  // defaults survive an empty object
  CHECK(to_json(config_from_json(json::object())) == to_json(StudyConfig{}));
  // c_dim "auto" maps back to the default
  json auto_cdim = j;
  auto_cdim["weights"]["c_dim"] = "auto";
  CHECK_FALSE(config_from_json(auto_cdim).c_dim.has_value());
}

TEST_CASE("unknown or malformed keys are configuration errors") {
  for (const json& bad : {json{{"dimz", 4}}, json{{"weights", {{"pp", 0.5}}}}, json{{"method", "spline"}},
                          json{{"budgets", "many"}}, json{{"mode", "greedy"}}}) {
    try {
      config_from_json(bad);
      FAIL("expected config error for " << bad.dump());
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
  }
}

TEST_CASE("validation") {
  small(Method::Interp).validate();
  StudyConfig c = small(Method::Interp);
  c.budgets = {};
  expect_config_error(c);
  c.budgets = {9, 9};
  expect_config_error(c);
  c.budgets = {0, 3};
  expect_config_error(c);
  c = small(Method::Interp);
  c.mc_samples = 50;
  expect_config_error(c);
  c = small(Method::Interp);
  c.format = "xml";
  expect_config_error(c);
  c = small(Method::Interp);
  c.kappa = 0.5;
  expect_config_error(c);
  c = small(Method::Interp);
  c.p = 2.0;
  expect_config_error(c);
  c = small(Method::Interp);
  c.field.dims = 0;
  expect_config_error(c);
  c = small(Method::Interp);
  c.mesh.cells = 1;
  expect_config_error(c);
}

TEST_CASE("hash ignores output settings only") {
  StudyConfig c = small(Method::Quad);
  const std::string h = config_hash(c);
  CHECK(h.size() == 16);
  c.out = "/tmp/x.csv";
  c.format = "json";
  CHECK(config_hash(c) == h);
  c.seed += 1;
  CHECK(config_hash(c) != h);
}

TEST_CASE("rate fit") {
  const RateFit exact = fit_rate(power_law(3.0, 2.0, {0, 0, 0, 0, 0}));
  CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(exact.used == 5);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<double> noise;
  for (int i = 0; i < 6; ++i) noise.push_back(u(gen));
  CHECK(std::abs(fit_rate(power_law(3.0, 2.0, noise)).slope - 2.0) <= 0.2);
  CHECK(std::abs(fit_rate(power_law(1.0, 0.0, {0, 0, 0, 0})).slope) <= 1e-12);

  auto with_zero = power_law(3.0, 1.0, {0, 0, 0, 0});
  with_zero[1].error = 0.0;
  const RateFit z = fit_rate(with_zero);
  CHECK(z.excluded == 1);
  CHECK(z.slope == doctest::Approx(1.0));
  try {
    fit_rate(power_law(1.0, 1.0, {0, 0}));
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("record serialisation") {
  CHECK(records_to_csv({}) == "method,n,cost,error,error_se,param,wall_ms,config_hash\n");
  CHECK(records_from_csv(records_to_csv({})).empty());
  std::vector<StudyRecord> recs{{"quad", 9, 9, 0.1, 1.0 / 3.0, 2.0, 0.0, "00ff00ff00ff00ff"},
                                {"quad", 41, 41, 1e-300, 5e-324, std::nextafter(1.0, 2.0), 12.5, "00ff00ff00ff00ff"}};
  CHECK(records_from_csv(records_to_csv(recs)) == recs);
  const StudyConfig c = small(Method::Quad);
  const json j = records_to_json(recs, c);
  CHECK(records_from_json(json::parse(j.dump())) == recs);
  CHECK(j.at("config_hash") == config_hash(c));
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("interpolation with one point is the constant u(0)") {
  StudyConfig c = small(Method::Interp);
  c.budgets = {1};
  const auto recs = run_study(c);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].cost == 1);
  CHECK(recs[0].config_hash == config_hash(c));

  const ParametricProblem p = c.problem();
  const FemSolution u0 = p.solve(ParamPoint{});
  auto mc = [&](RandomStream stream) {
    const auto ys = sample_points(c.field.dims, c.field.measure.a, stream, c.mc_samples);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& y : ys) {
      const double e = std::pow(v_norm(p.solve(y) - u0), 2);
      sum += e;
      sum2 += e * e;
    }
    const double n = static_cast<double>(ys.size());
    return std::pair{sum / n, std::sqrt((sum2 / n - std::pow(sum / n, 2)) / (n - 1.0))};
  };
  // same draws: the pipeline adds nothing
  const auto [same, same_se] = mc({c.seed, 1});
  CHECK(recs[0].error == doctest::Approx(std::sqrt(same)).epsilon(1e-12));
  // fresh draws: agreement within the combined error
  const auto [fresh, fresh_se] = mc({c.seed + 1000, 1});
  CHECK(std::abs(recs[0].error * recs[0].error - fresh) <= 4.0 * std::hypot(same_se, fresh_se));
}

TEST_CASE("studies are deterministic and respect the budget") {
  for (Method m : {Method::Interp, Method::Quad, Method::Ls, Method::LsQuad, Method::Truncation}) {
    const StudyConfig c = small(m);
    const auto a = run_study(c);
    const auto b = run_study(c);
    CHECK(a == b);
    REQUIRE(a.size() == c.budgets.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].method == to_string(m));
      CHECK(a[i].n == c.budgets[i]);
      if (m != Method::Truncation) CHECK(a[i].cost <= a[i].n);
      CHECK(a[i].error >= 0.0);
      CHECK(a[i].wall_ms == 0.0);
    }
  }
}

TEST_CASE("quadrature error decreases on the default budgets") {
  StudyConfig c = small(Method::Quad);
  c.budgets = {9, 41, 137};
  const auto r = run_study(c);
  CHECK(r[1].error < r[0].error);
  CHECK(r[2].error < r[1].error);
}

TEST_CASE("errors carry the failing budget") {
  StudyConfig c = small(Method::Ls);
  c.budgets = {5, 50};
  c.kappa = 1.0;  // n = m: an interpolating design, still fine
  CHECK(run_study(c).size() == 2);
  c = small(Method::Interp);
  c.field.theta0 = 40.0;  // fine at the MC draws, overflows at the outer grid nodes
  c.mc_samples = 200;
  c.budgets = {1, 400};
  try {
    run_study(c);
    FAIL("expected a failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("budget n=400") != std::string::npos);
  }
}

TEST_CASE("oversized budgets are refused before any solve") {
  for (Method m : {Method::Interp, Method::Quad, Method::Ls, Method::LsQuad, Method::Truncation}) {
    StudyConfig c = small(m);
    c.budgets = {1, 2'000'000'000};
    try {
      run_study(c);
      FAIL("expected budget exceeded");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BudgetExceeded);
      CHECK(std::string(e.what()).find("n=2000000000") != std::string::npos);
    }
  }
  StudyConfig c = small(Method::Quad);
  c.reference_samples = 20'000'000;
  expect_config_error(c);
}

TEST_CASE("interpolation grids nest and errors do not grow beyond noise") {
  StudyConfig c = small(Method::Interp);
  c.budgets = {1, 9, 41, 137, 400};
  c.mc_samples = 2000;
  const WeightConfig w = c.weights();
  std::vector<std::set<MultiIndex>> sets;
  for (std::uint64_t n : c.budgets) {
    const IndexSet s = choose_xi_for_budget(n, w, BudgetMode::Points, c.field.dims).set;
    sets.emplace_back(s.begin(), s.end());
  }
  for (std::size_t i = 1; i < sets.size(); ++i)
    CHECK(std::includes(sets[i].begin(), sets[i].end(), sets[i - 1].begin(), sets[i - 1].end()));
  const auto r = run_study(c);
  for (std::size_t i = 1; i < r.size(); ++i) {
    CHECK(r[i].cost >= r[i - 1].cost);
    CHECK(r[i].error <= r[i - 1].error + 3.0 * std::hypot(r[i].error_se, r[i - 1].error_se));
  }
}
