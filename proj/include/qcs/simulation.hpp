#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qcs/alpha_distribution.hpp"
#include "qcs/protocol.hpp"
#include "qcs/strategy.hpp"

namespace qcs::sim {

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// Exact (Clopper-Pearson) binomial interval; valid at 0 and n successes.
ConfidenceInterval clopper_pearson(std::uint64_t successes,
                                   std::uint64_t trials,
                                   double confidence = 0.95);

struct TrialConfig {
  std::uint32_t n = 20;
  Strategy alice = Strategy::honest();
  Strategy bob = Strategy::honest();
  NoiseModel noise = NoiseModel::ideal();
  AlphaDistribution alpha = AlphaDistribution::uniform(0.9, 0.99);
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct TrialReport {
  std::uint32_t n = 0;
  std::uint64_t trials = 0;

  // Aborts by mismatch detection, indexed by abort step (1..N).
  std::vector<std::uint64_t> detection_histogram;
  std::uint64_t aborted_mismatch = 0;
  std::uint64_t aborted_timeout = 0;
  std::uint64_t aborted_transport = 0;
  std::uint64_t completed = 0;

  std::uint64_t valid_count = 0;
  std::uint64_t bind_route_alice = 0;  // alice accepts and bob fails to reject
  std::uint64_t bind_route_bob = 0;
  std::uint64_t flagged_alice = 0;
  std::uint64_t flagged_bob = 0;

  double p_valid = 0.0;
  double p_bind_alice = 0.0;
  double p_bind_bob = 0.0;
  ConfidenceInterval ci_valid, ci_bind_alice, ci_bind_bob;
};

// Runs full sessions: initialization, exchange, post-abort completion per
// intent, alpha draw, verdict. Deterministic given the seed; trials use
// independent substreams so threading cannot change the counts.
TrialReport run_trials(const TrialConfig& config);

std::string report_json(const TrialReport& report);
void write_report_csv(const TrialReport& report, std::ostream& out);

struct DetectionPoint {
  std::uint32_t exposure = 0;   // delta_m (or k_a for rotated strategies)
  std::uint64_t at_risk = 0;    // trials that reached this exposure
  std::uint64_t detected = 0;   // detected at or before this exposure
  double empirical = 0.0;
  double exact = 0.0;
  ConfidenceInterval ci;
};

struct DetectionCurve {
  Strategy bob;
  std::vector<DetectionPoint> points;
};

// Empirical probability that honest Alice catches Bob within his first
// delta_m off-protocol measurements, against the closed-form law
// (1 - (3/4)^delta_m, or the per-qubit product law for rotated
// strategies, whose exposures count accept-basis qubits only).
DetectionCurve estimate_detection_curve(const Strategy& bob, std::uint32_t n,
                                        std::uint32_t max_exposure,
                                        std::uint64_t trials,
                                        std::uint64_t seed);

void write_detection_csv(const DetectionCurve& curve, std::ostream& out);

struct GridCellSpec {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  double alpha = 0.9;
};

struct GridCell {
  GridCellSpec spec;
  std::uint64_t trials = 0;
  double empirical = 0.0;
  double expected = 0.0;
  double z = 0.0;
  bool pass = false;
};

// Monte Carlo estimate of "an honest measurer of the first m qubits can
// still reject" against the exact split-averaged formula; a cell passes
// inside 4 sigma.
std::vector<GridCell> validate_against_analysis(
    std::span<const GridCellSpec> grid, std::uint64_t trials_per_cell,
    std::uint64_t seed, unsigned threads = 0);

std::vector<GridCellSpec> default_validation_grid();

void write_grid_csv(std::span<const GridCell> cells, std::ostream& out);

}  // namespace qcs::sim
