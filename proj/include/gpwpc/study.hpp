#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpwpc/least_squares.hpp"
#include "gpwpc/multiindex.hpp"
#include "gpwpc/pde_model.hpp"

namespace gpwpc {

enum class Method { Truncation, Interp, Quad, Ls, LsQuad };

const char* to_string(Method m) noexcept;
Method method_from_string(const std::string& s);

// Memory guards: budgets past these raise BudgetExceeded up front.
inline constexpr std::uint64_t kMaxGridPoints = 5'000'000;
inline constexpr std::uint64_t kMaxDesignEntries = 20'000'000;  ///< n·m of the LS design
inline constexpr std::uint64_t kMaxTruncationTerms = 1'000'000;
inline constexpr std::size_t kMaxSamples = 10'000'000;  ///< MC and reference draws

/// What the quadrature studies integrate: the full solution (error in the V
/// norm) or a scalar functional of it.
enum class QuadTarget { Solution, Functional };

struct StudyConfig {
  FieldSpec field;
  Mesh mesh;
  double load = 1.0;
  Functional functional = Functional::mean();
  QuadTarget target = QuadTarget::Solution;

  // weights
  double p = 0.5;
  int r = 0;  ///< 0 selects WeightConfig::default_r(p)
  double eta = 1.5;
  double sigma_rho = 0.5;
  WeightFamily family = WeightFamily::Rho;
  double b_scaling = 1.0;
  std::optional<double> c_dim;  ///< empty selects monotone_c_dim
  double c_global = 1.0;
  double theta = 0.0;
  double lambda = 0.0;

  Method method = Method::Interp;
  std::vector<std::uint64_t> budgets{1, 9, 41, 137, 400};
  std::size_t mc_samples = 2000;
  std::size_t reference_samples = 100000;
  std::uint64_t seed = 42;
  double kappa = kDefaultKappa;
  SamplingMode mode = SamplingMode::Plain;
  int quad_margin = 3;
  bool timing = false;

  std::string out;
  std::string format = "csv";

  void validate() const;
  WeightConfig weights() const;
  ParametricProblem problem() const;
};

nlohmann::json to_json(const StudyConfig& cfg);
/// Missing keys keep their defaults; unknown keys are a configuration error.
StudyConfig config_from_json(const nlohmann::json& j);
StudyConfig load_config(const std::string& path);

/// FNV-1a 64 over the canonical JSON of the configuration without the output
/// path and format, as 16 hex digits.
std::string config_hash(const StudyConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes) noexcept;

struct StudyRecord {
  std::string method;
  std::uint64_t n = 0;
  std::uint64_t cost = 0;
  double error = 0.0;
  double error_se = 0.0;
  double param = 0.0;
  double wall_ms = 0.0;
  std::string config_hash;

  friend bool operator==(const StudyRecord&, const StudyRecord&) = default;
};

std::vector<StudyRecord> run_study(const StudyConfig& cfg);

struct RateFit {
  double slope = 0.0;  ///< empirical order: error ≈ C n^{-slope}
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

RateFit fit_rate(const std::vector<StudyRecord>& records);

std::string records_to_csv(const std::vector<StudyRecord>& records);
nlohmann::json records_to_json(const std::vector<StudyRecord>& records, const StudyConfig& cfg);
std::vector<StudyRecord> records_from_json(const nlohmann::json& j);
std::vector<StudyRecord> records_from_csv(const std::string& text);

/// Writes records to path as "csv" or "json".
void emit(const std::vector<StudyRecord>& records, const StudyConfig& cfg, const std::string& path,
          const std::string& format);

/// %.17g
std::string format_double(double v);

}  // namespace gpwpc
