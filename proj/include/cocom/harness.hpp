#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cocom/core.hpp"
#include "cocom/environments.hpp"
#include "cocom/metrics.hpp"
#include "cocom/penalty.hpp"

namespace cocom {

enum class Algorithm { PenaltyOgd, Odaf, OdafDoubling };
const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

enum class EnvFamily { AppendixA, Separable };
const char* to_string(EnvFamily f);
EnvFamily parse_env_family(const std::string& s);

struct LambdaConfig {
  enum class Mode { Theorem, InvSqrtT, Explicit };
  Mode mode = Mode::Theorem;
  double value = 0.0;  // Explicit only
  double E = 0.0;      // error estimate for the optimistic theorem value
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::PenaltyOgd;
  ProblemVariant variant = ProblemVariant::CocoM2;
  EnvFamily family = EnvFamily::AppendixA;
  AppendixAParams appendix;
  SeparableParams separable;
  Penalty::Kind penalty = Penalty::Kind::Quadratic;
  LambdaConfig lambda;
  Predictor::Kind predictor = Predictor::Kind::Perfect;
  double predictor_scale = 0.0;
  std::uint64_t predictor_seed = 0;
  double alpha = 0.0;  // optimistic regularizer scale, 0 = ||X||^2
  double E1 = 0.0;     // doubling: initial error budget
  std::vector<std::uint64_t> seeds{1};
  double grid_resolution = 1e-3;
  std::vector<int> checkpoints;  // empty: ten evenly spaced rounds
  std::string output = "out";

  int T() const;
  int m() const;
  int first_round() const;
  std::vector<int> resolved_checkpoints() const;

  // throws ConfigError for unsupported algorithm / variant / environment combinations
  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

ExperimentConfig load_config(const std::string& path);

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  InstanceConstants constants;
  RunTrace trace;
  RegretSeries series;
  BoundReport bounds;
  bool fixed_lambda = true;  // false for schedules and doubling
  double lambda = 0.0;       // value used (nominal 1/sqrt(T) under the schedule)
  double initial_violation = 0.0;

  // optimistic runs
  double E_Z = 0.0, E_f = 0.0, E_g = 0.0, E_g_literal = 0.0;
  double Z_value_sum = 0.0;
  double mu_final = 0.0;
  double C = 0.0;
  double alpha = 0.0;
  int fixed_point_misses = 0;
  int epochs = 1;
  double mu1 = 0.0;
  double mu_peak = 0.0;

  nlohmann::json summary_json() const;
};

// Generates the instance for `seed`, runs the learner and computes metrics and bounds.
// Contract violations inside the learner are caught and reported through ok/error.
SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

extern const char* const kCsvHeader;
void emit_csv(const SeedResult& r, std::ostream& os);
std::string csv_string(const SeedResult& r);
// shortest round-trip decimal
std::string format_double(double v);

struct Check {
  std::string name;
  bool ok = true;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Invariant suite for one finished seed.
std::vector<Check> verify_seed(const ExperimentConfig& cfg, const SeedResult& r);

struct ExperimentSummary {
  nlohmann::json json;
  std::vector<SeedResult> results;  // seed order
  int failed = 0;
};

// Runs all seeds (up to `parallel` at a time). With a non-empty out_dir, writes
// seed_<seed>.csv per seed and summary.json.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int parallel);

// aggregate over finished seeds; exposed for tests
nlohmann::json aggregate(const ExperimentConfig& cfg, const std::vector<SeedResult>& results);

}  // namespace cocom
