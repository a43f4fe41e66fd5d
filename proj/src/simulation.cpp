#include "qcs/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qcs/analysis.hpp"
#include "qcs/logprob.hpp"
#include "qcs/thresholds.hpp"

namespace qcs::sim {

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// P(X <= k) for X ~ Binomial(n, p). Sums the smaller tail from its edge
// term, where successive ratios decay geometrically.
double binom_cdf(long long n, long long k, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;

  if (static_cast<double>(k) <= static_cast<double>(n) * p) {
    const double log_edge = log_binom_coeff(n, k) +
                            static_cast<double>(k) * std::log(p) +
                            static_cast<double>(n - k) * std::log1p(-p);
    double rel = 1.0, acc = 1.0;
    for (long long i = k; i > 0; --i) {
      rel *= static_cast<double>(i) * (1.0 - p) /
             (static_cast<double>(n - i + 1) * p);
      acc += rel;
      if (rel < 1e-18) break;
    }
    return std::exp(log_edge) * acc;
  }
  const double log_edge = log_binom_coeff(n, k + 1) +
                          static_cast<double>(k + 1) * std::log(p) +
                          static_cast<double>(n - k - 1) * std::log1p(-p);
  double rel = 1.0, acc = 1.0;
  for (long long i = k + 1; i < n; ++i) {
    rel *= static_cast<double>(n - i) * p /
           (static_cast<double>(i + 1) * (1.0 - p));
    acc += rel;
    if (rel < 1e-18) break;
  }
  return 1.0 - std::exp(log_edge) * acc;
}

// Solves binom_cdf(n, k, p) = target for p (the CDF is decreasing in p).
double invert_binom_cdf(long long n, long long k, double target) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (binom_cdf(n, k, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ConfidenceInterval clopper_pearson(std::uint64_t successes,
                                   std::uint64_t trials, double confidence) {
  if (trials == 0 || successes > trials) {
    throw std::invalid_argument("clopper_pearson: bad counts");
  }
  const double tail = 0.5 * (1.0 - confidence);
  const auto n = static_cast<long long>(trials);
  const auto k = static_cast<long long>(successes);
  ConfidenceInterval ci;
  // lo solves P(X >= k; p) = tail, hi solves P(X <= k; p) = tail.
  ci.lo = successes == 0 ? 0.0 : invert_binom_cdf(n, k - 1, 1.0 - tail);
  ci.hi = successes == trials ? 1.0 : invert_binom_cdf(n, k, tail);
  return ci;
}

namespace {

struct TrialCounters {
  std::vector<std::uint64_t> detection_histogram;
  std::uint64_t aborted_mismatch = 0;
  std::uint64_t aborted_timeout = 0;
  std::uint64_t aborted_transport = 0;
  std::uint64_t completed = 0;
  std::uint64_t valid_count = 0;
  std::uint64_t bind_route_alice = 0;
  std::uint64_t bind_route_bob = 0;
  std::uint64_t flagged_alice = 0;
  std::uint64_t flagged_bob = 0;

  void merge(const TrialCounters& other) {
    for (std::size_t i = 0; i < detection_histogram.size(); ++i) {
      detection_histogram[i] += other.detection_histogram[i];
    }
    aborted_mismatch += other.aborted_mismatch;
    aborted_timeout += other.aborted_timeout;
    aborted_transport += other.aborted_transport;
    completed += other.completed;
    valid_count += other.valid_count;
    bind_route_alice += other.bind_route_alice;
    bind_route_bob += other.bind_route_bob;
    flagged_alice += other.flagged_alice;
    flagged_bob += other.flagged_bob;
  }
};

void run_one_trial(const TrialConfig& config, Rng trial_rng,
                   TrialCounters& counters) {
  const SessionRecord session = init_session(config.n, trial_rng);
  const ExchangeResult exchange = run_exchange(
      session, config.alice, config.bob, config.noise, trial_rng);

  switch (exchange.transcript.abort_reason) {
    case AbortReason::None:
      ++counters.completed;
      break;
    case AbortReason::MismatchDetected:
      ++counters.aborted_mismatch;
      ++counters.detection_histogram[*exchange.transcript.abort_step];
      break;
    case AbortReason::Timeout:
      ++counters.aborted_timeout;
      break;
    case AbortReason::TransportFailure:
      ++counters.aborted_transport;
      break;
  }

  const BindingClaim claim_alice =
      finish_and_claim(session, Party::Alice, exchange.alice,
                       config.alice.intent, config.noise, trial_rng);
  const BindingClaim claim_bob =
      finish_and_claim(session, Party::Bob, exchange.bob, config.bob.intent,
                       config.noise, trial_rng);
  const double alpha = sample_alpha(config.alpha, trial_rng);
  const Verdict verdict = binding_verdict(session, claim_alice, claim_bob,
                                          alpha, config.noise.tolerance);

  counters.valid_count += verdict.contract_valid;
  counters.bind_route_alice += verdict.alice_accepts && !verdict.bob_rejects;
  counters.bind_route_bob += verdict.bob_accepts && !verdict.alice_rejects;
  counters.flagged_alice += verdict.cheater == CheaterFlag::Alice ||
                            verdict.cheater == CheaterFlag::Both;
  counters.flagged_bob += verdict.cheater == CheaterFlag::Bob ||
                          verdict.cheater == CheaterFlag::Both;
}

}  // namespace

TrialReport run_trials(const TrialConfig& config) {
  if (config.trials == 0) {
    throw std::invalid_argument("trials: must be at least 1");
  }
  config.alice.validate(config.n);
  config.bob.validate(config.n);

  const Rng master(config.seed);
  const unsigned n_threads = std::min<unsigned>(
      resolve_threads(config.threads),
      static_cast<unsigned>(std::max<std::uint64_t>(1, config.trials / 256)));

  auto run_slice = [&](unsigned slice) {
    TrialCounters counters;
    counters.detection_histogram.assign(config.n + 1, 0);
    for (std::uint64_t t = slice; t < config.trials; t += n_threads) {
      run_one_trial(config, master.substream(t), counters);
    }
    return counters;
  };

  std::vector<std::future<TrialCounters>> futures;
  for (unsigned s = 1; s < n_threads; ++s) {
    futures.push_back(std::async(std::launch::async, run_slice, s));
  }
  TrialCounters total = run_slice(0);
  for (auto& f : futures) total.merge(f.get());

  TrialReport report;
  report.n = config.n;
  report.trials = config.trials;
  report.detection_histogram = std::move(total.detection_histogram);
  report.aborted_mismatch = total.aborted_mismatch;
  report.aborted_timeout = total.aborted_timeout;
  report.aborted_transport = total.aborted_transport;
  report.completed = total.completed;
  report.valid_count = total.valid_count;
  report.bind_route_alice = total.bind_route_alice;
  report.bind_route_bob = total.bind_route_bob;
  report.flagged_alice = total.flagged_alice;
  report.flagged_bob = total.flagged_bob;

  const double trials = static_cast<double>(config.trials);
  report.p_valid = static_cast<double>(total.valid_count) / trials;
  report.p_bind_alice = static_cast<double>(total.bind_route_alice) / trials;
  report.p_bind_bob = static_cast<double>(total.bind_route_bob) / trials;
  report.ci_valid = clopper_pearson(total.valid_count, config.trials);
  report.ci_bind_alice = clopper_pearson(total.bind_route_alice, config.trials);
  report.ci_bind_bob = clopper_pearson(total.bind_route_bob, config.trials);
  return report;
}

std::string report_json(const TrialReport& report) {
  nlohmann::json doc;
  doc["n"] = report.n;
  doc["trials"] = report.trials;
  doc["aborts"] = {{"mismatch_detected", report.aborted_mismatch},
                   {"timeout", report.aborted_timeout},
                   {"transport_failure", report.aborted_transport},
                   {"completed", report.completed}};
  nlohmann::json hist = nlohmann::json::array();
  for (std::uint32_t step = 1; step < report.detection_histogram.size();
       ++step) {
    if (report.detection_histogram[step] > 0) {
      hist.push_back({{"step", step},
                      {"count", report.detection_histogram[step]}});
    }
  }
  doc["detection_histogram"] = hist;
  doc["valid_count"] = report.valid_count;
  doc["flagged"] = {{"alice", report.flagged_alice},
                    {"bob", report.flagged_bob}};
  doc["p_valid"] = report.p_valid;
  doc["p_bind_alice"] = report.p_bind_alice;
  doc["p_bind_bob"] = report.p_bind_bob;
  doc["ci95"] = {
      {"p_valid", {report.ci_valid.lo, report.ci_valid.hi}},
      {"p_bind_alice", {report.ci_bind_alice.lo, report.ci_bind_alice.hi}},
      {"p_bind_bob", {report.ci_bind_bob.lo, report.ci_bind_bob.hi}}};
  return doc.dump(2);
}

void write_report_csv(const TrialReport& report, std::ostream& out) {
  out << "metric,value\n";
  out << "n," << report.n << "\n";
  out << "trials," << report.trials << "\n";
  out << "completed," << report.completed << "\n";
  out << "aborted_mismatch," << report.aborted_mismatch << "\n";
  out << "aborted_timeout," << report.aborted_timeout << "\n";
  out << "aborted_transport," << report.aborted_transport << "\n";
  out << "valid_count," << report.valid_count << "\n";
  out << "flagged_alice," << report.flagged_alice << "\n";
  out << "flagged_bob," << report.flagged_bob << "\n";
  char row[128];
  std::snprintf(row, sizeof(row), "p_valid,%.10g\n", report.p_valid);
  out << row;
  std::snprintf(row, sizeof(row), "p_bind_alice,%.10g\n", report.p_bind_alice);
  out << row;
  std::snprintf(row, sizeof(row), "p_bind_bob,%.10g\n", report.p_bind_bob);
  out << row;
  for (std::uint32_t step = 1; step < report.detection_histogram.size();
       ++step) {
    if (report.detection_histogram[step] > 0) {
      out << "detections_at_step_" << step << ","
          << report.detection_histogram[step] << "\n";
    }
  }
}

DetectionCurve estimate_detection_curve(const Strategy& bob, std::uint32_t n,
                                        std::uint32_t max_exposure,
                                        std::uint64_t trials,
                                        std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials: must be at least 1");
  bob.validate(n);
  const bool rotated = bob.kind == Strategy::Kind::Rotated;
  const double q_a = rotated ? std::cos(bob.theta) : 0.0;

  // detected_at[e]: first detection happened at exposure e;
  // reached[e]: trial survived to at least e exposures undetected.
  std::vector<std::uint64_t> detected_at(max_exposure + 1, 0);
  std::vector<std::uint64_t> reached(max_exposure + 1, 0);

  const Strategy alice = Strategy::honest();
  const NoiseModel ideal = NoiseModel::ideal();
  const Rng master(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = master.substream(t);
    const SessionRecord session = init_session(n, rng);
    const ExchangeResult res =
        run_exchange(session, alice, bob, ideal, rng);

    const std::uint32_t last_round =
        res.transcript.abort_step.value_or(n);
    std::uint32_t exposures = 0;
    for (std::uint32_t m = 1; m <= last_round; ++m) {
      bool exposure = false;
      switch (bob.kind) {
        case Strategy::Kind::Honest:
          break;
        case Strategy::Kind::AlwaysReject:
        case Strategy::Kind::Guesser:
          exposure = true;
          break;
        case Strategy::Kind::MixedReject:
          exposure = bob.uses_round(m);
          break;
        case Strategy::Kind::Rotated:
          exposure = bob.uses_round(m) &&
                     session.bob_qubits[m - 1].basis() == Basis::Accept;
          break;
      }
      if (exposure) ++exposures;
    }
    const bool detected =
        res.transcript.abort_reason == AbortReason::MismatchDetected;
    if (detected && exposures <= max_exposure) ++detected_at[exposures];
    // Detection always lands on an exposure round, so a detected trial
    // survived exactly exposures - 1 of them.
    const std::uint32_t survived_to =
        detected ? (exposures > 0 ? exposures - 1 : 0) : exposures;
    for (std::uint32_t e = 0; e <= std::min(survived_to, max_exposure); ++e) {
      ++reached[e];
    }
  }

  DetectionCurve curve;
  curve.bob = bob;
  std::uint64_t cumulative = 0;
  for (std::uint32_t e = 1; e <= max_exposure; ++e) {
    cumulative += detected_at[e];
    DetectionPoint point;
    point.exposure = e;
    // Trials that either reached e exposures or were detected earlier.
    point.at_risk = reached[e] + cumulative;
    point.detected = cumulative;
    point.empirical =
        point.at_risk > 0
            ? static_cast<double>(cumulative) / static_cast<double>(point.at_risk)
            : 0.0;
    point.exact = rotated ? analysis::detection_prob_rotated_exact(e, q_a)
                          : analysis::detection_prob(e);
    if (point.at_risk > 0) {
      point.ci = clopper_pearson(point.detected, point.at_risk);
    }
    curve.points.push_back(point);
  }
  return curve;
}

void write_detection_csv(const DetectionCurve& curve, std::ostream& out) {
  out << "delta_m,at_risk,detected,empirical,exact,ci95_lo,ci95_hi\n";
  char row[192];
  for (const auto& p : curve.points) {
    std::snprintf(row, sizeof(row), "%u,%llu,%llu,%.10g,%.10g,%.10g,%.10g\n",
                  p.exposure, static_cast<unsigned long long>(p.at_risk),
                  static_cast<unsigned long long>(p.detected), p.empirical,
                  p.exact, p.ci.lo, p.ci.hi);
    out << row;
  }
}

std::vector<GridCell> validate_against_analysis(
    std::span<const GridCellSpec> grid, std::uint64_t trials_per_cell,
    std::uint64_t seed, unsigned threads) {
  if (trials_per_cell == 0) {
    throw std::invalid_argument("trials: must be at least 1");
  }
  std::vector<GridCell> cells(grid.size());
  const Rng master(seed);

  auto run_cell = [&](std::size_t index) {
    const GridCellSpec& spec = grid[index];
    if (spec.m > spec.n) {
      throw std::invalid_argument("grid: m must not exceed n");
    }
    const Rng cell_rng = master.substream(index);
    std::uint64_t can_reject = 0;
    const Observable accept = Observable::accept();
    const NoiseModel ideal = NoiseModel::ideal();
    for (std::uint64_t t = 0; t < trials_per_cell; ++t) {
      Rng rng = cell_rng.substream(t);
      const auto prep = prepare_sequence(spec.n, rng);
      long long n_reject = 0;
      for (const auto& q : prep) n_reject += q.basis() == Basis::Reject;
      long long wrong = 0;
      for (std::uint32_t i = 0; i < spec.m; ++i) {
        const int outcome = measure(prep[i], accept, ideal, rng);
        if (prep[i].basis() == Basis::Reject && outcome != prep[i].state_bit) {
          ++wrong;
        }
      }
      can_reject += rejection_succeeds(wrong, spec.alpha, n_reject);
    }

    GridCell cell;
    cell.spec = spec;
    cell.trials = trials_per_cell;
    cell.empirical = static_cast<double>(can_reject) /
                     static_cast<double>(trials_per_cell);
    cell.expected = analysis::prob_reject_avg(spec.m, spec.alpha, spec.n,
                                              analysis::SplitModel::binomial())
                        .linear();
    const double sigma = std::sqrt(cell.expected * (1.0 - cell.expected) /
                                   static_cast<double>(trials_per_cell));
    if (sigma > 0.0) {
      cell.z = (cell.empirical - cell.expected) / sigma;
    } else {
      cell.z = cell.empirical == cell.expected
                   ? 0.0
                   : std::numeric_limits<double>::infinity();
    }
    cell.pass = std::abs(cell.z) <= 4.0;
    cells[index] = cell;
  };

  const unsigned n_threads =
      std::min<unsigned>(resolve_threads(threads),
                         static_cast<unsigned>(std::max<std::size_t>(
                             1, grid.size())));
  std::vector<std::future<void>> futures;
  auto run_slice = [&](unsigned slice) {
    for (std::size_t i = slice; i < grid.size(); i += n_threads) run_cell(i);
  };
  for (unsigned s = 1; s < n_threads; ++s) {
    futures.push_back(std::async(std::launch::async, run_slice, s));
  }
  run_slice(0);
  for (auto& f : futures) f.get();
  return cells;
}

std::vector<GridCellSpec> default_validation_grid() {
  std::vector<GridCellSpec> grid;
  const double alphas[] = {0.55, 0.7, 0.9};
  for (std::uint32_t n : {2u, 10u, 40u, 100u}) {
    std::vector<std::uint32_t> ms = {0, 1, n / 4, n / 2, n};
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    for (std::uint32_t m : ms) {
      for (double alpha : alphas) grid.push_back({n, m, alpha});
    }
  }
  return grid;
}

void write_grid_csv(std::span<const GridCell> cells, std::ostream& out) {
  out << "n,m,alpha,trials,empirical,expected,z,pass\n";
  char row[192];
  for (const auto& c : cells) {
    std::snprintf(row, sizeof(row), "%u,%u,%.6g,%llu,%.10g,%.10g,%.6g,%d\n",
                  c.spec.n, c.spec.m, c.spec.alpha,
                  static_cast<unsigned long long>(c.trials), c.empirical,
                  c.expected, c.z, c.pass ? 1 : 0);
    out << row;
  }
}

}  // namespace qcs::sim
