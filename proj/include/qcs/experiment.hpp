#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcs/alpha_distribution.hpp"
#include "qcs/analysis.hpp"
#include "qcs/simulation.hpp"
#include "qcs/strategy.hpp"

namespace qcs::experiment {

// A config field failed validation; `field` names the offender.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  long long n = 600;
  std::vector<long long> n_list;  // scaling command
  std::string split = "binomial";

  std::string alpha_kind = "uniform";  // uniform | point
  double alpha_lo = 0.9;
  double alpha_hi = 0.99;
  double alpha_point = 0.95;

  double quad_tol = 1e-5;
  double noise = 0.0;
  double eta = 0.0;

  std::string strategy_alice = "honest";
  std::string strategy_bob = "honest";
  std::string intent_alice = "bind";
  std::string intent_bob = "bind";

  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  std::string out_dir = ".";
  std::string format = "json";  // json | csv (trial report format)

  // verify command
  long long oracle_max_n = 12;

  // serve command
  std::uint16_t port = 0;

  // bind command
  std::string session_file;
  std::string claim_a_file;
  std::string claim_b_file;
  bool use_alpha_point = false;
};

// Resolved pieces of a validated config.
analysis::SplitModel parse_split(const ExperimentConfig& config);
AlphaDistribution parse_alpha(const ExperimentConfig& config);
Strategy parse_strategy(const std::string& spec, const std::string& intent,
                        std::uint32_t n, const char* field);
void validate_common(const ExperimentConfig& config);

std::string config_json(const ExperimentConfig& config);

struct AnalyzeOutcome {
  long long sup_m = 0;
  double sup_value = 0.0;
  std::string curve_csv_path;
  std::string summary_json_path;
};
AnalyzeOutcome run_analyze(const ExperimentConfig& config);

struct SimulateOutcome {
  sim::TrialReport report;
  std::string report_path;
  std::string detection_csv_path;  // empty unless a detection curve applies
};
SimulateOutcome run_simulate(const ExperimentConfig& config);

struct ScalingOutcome {
  std::vector<std::pair<double, double>> points;  // (N, sup)
  analysis::PowerLawFit fit;
  std::string points_csv_path;
  std::string fit_json_path;
};
ScalingOutcome run_scaling(const ExperimentConfig& config);

struct VerifyOutcome {
  bool oracle_ok = false;
  std::size_t oracle_checks = 0;
  double oracle_worst_rel = 0.0;
  std::size_t grid_cells = 0;
  std::size_t grid_passes = 0;
  bool grid_ok = false;
  std::string grid_csv_path;
  std::string summary_json_path;
  bool ok() const { return oracle_ok && grid_ok; }
};
VerifyOutcome run_verify(const ExperimentConfig& config);

struct BindOutcome {
  Verdict verdict;
  std::string verdict_bin_path;
  std::string verdict_json_path;
};
BindOutcome run_bind(const ExperimentConfig& config);

}  // namespace qcs::experiment
