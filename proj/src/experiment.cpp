#include "qcs/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qcs/oracle.hpp"
#include "qcs/version.hpp"
#include "qcs/wire.hpp"

namespace qcs::experiment {

namespace {

namespace fs = std::filesystem;

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void log_wall_time(const char* command, double seconds) {
  // Kept out of the output files so identical configs produce identical
  // bytes.
  std::fprintf(stderr, "qcs %s: wall time %.2fs\n", command, seconds);
}

std::string out_path(const ExperimentConfig& config, const std::string& name) {
  fs::create_directories(config.out_dir);
  return (fs::path(config.out_dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::set<std::uint32_t> parse_round_set(const std::string& text,
                                        std::uint32_t n, const char* field) {
  std::set<std::uint32_t> rounds;
  if (text == "all") {
    for (std::uint32_t r = 1; r <= n; ++r) rounds.insert(r);
    return rounds;
  }
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const long value = std::strtol(item.c_str(), &end, 10);
    if (end == item.c_str() || *end != '\0' || value < 1) {
      throw ConfigError(field, "bad round list entry '" + item + "'");
    }
    rounds.insert(static_cast<std::uint32_t>(value));
  }
  if (rounds.empty()) {
    throw ConfigError(field, "round list is empty");
  }
  return rounds;
}

}  // namespace

analysis::SplitModel parse_split(const ExperimentConfig& config) {
  if (config.split == "binomial") return analysis::SplitModel::binomial();
  if (config.split == "fixed-equal") {
    return analysis::SplitModel::fixed_equal();
  }
  throw ConfigError("split", "must be 'binomial' or 'fixed-equal', got '" +
                                 config.split + "'");
}

AlphaDistribution parse_alpha(const ExperimentConfig& config) {
  try {
    if (config.alpha_kind == "uniform") {
      return AlphaDistribution::uniform(config.alpha_lo, config.alpha_hi);
    }
    if (config.alpha_kind == "point") {
      return AlphaDistribution::point_mass(config.alpha_point);
    }
  } catch (const std::invalid_argument& error) {
    throw ConfigError("alpha", error.what());
  }
  throw ConfigError("alpha", "kind must be 'uniform' or 'point', got '" +
                                 config.alpha_kind + "'");
}

Strategy parse_strategy(const std::string& spec, const std::string& intent,
                        std::uint32_t n, const char* field) {
  Strategy::Intent parsed_intent;
  if (intent == "bind") {
    parsed_intent = Strategy::Intent::Bind;
  } else if (intent == "refuse") {
    parsed_intent = Strategy::Intent::Refuse;
  } else {
    throw ConfigError(field, "intent must be 'bind' or 'refuse', got '" +
                                 intent + "'");
  }

  if (spec == "honest") return Strategy::honest(parsed_intent);
  if (spec == "always-reject") return Strategy::always_reject(parsed_intent);
  if (spec == "guesser") return Strategy::guesser(parsed_intent);
  if (spec.rfind("mixed-reject:", 0) == 0) {
    return Strategy::mixed_reject(parse_round_set(spec.substr(13), n, field),
                                  parsed_intent);
  }
  if (spec.rfind("rotated:", 0) == 0) {
    // rotated:<theta>,<phi>:<rounds|all>
    const std::string rest = spec.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(field, "rotated needs 'rotated:<theta>,<phi>:<rounds>'");
    }
    const std::string angles = rest.substr(0, colon);
    const auto comma = angles.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(field, "rotated needs two angles");
    }
    double theta = 0.0, phi = 0.0;
    try {
      theta = std::stod(angles.substr(0, comma));
      phi = std::stod(angles.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError(field, "bad rotated angles '" + angles + "'");
    }
    if (theta < 0.0 || theta > M_PI) {
      throw ConfigError(field, "theta must lie in [0, pi]");
    }
    return Strategy::rotated(theta, phi,
                             parse_round_set(rest.substr(colon + 1), n, field),
                             parsed_intent);
  }
  throw ConfigError(field, "unknown strategy '" + spec + "'");
}

void validate_common(const ExperimentConfig& config) {
  if (config.n < 1) throw ConfigError("n", "must be at least 1");
  if (config.quad_tol <= 0.0) throw ConfigError("quad_tol", "must be positive");
  if (config.noise < 0.0 || config.noise > 1.0) {
    throw ConfigError("noise", "flip probability must lie in [0, 1]");
  }
  if (config.eta < 0.0 || config.eta >= 1.0) {
    throw ConfigError("eta", "tolerance must lie in [0, 1)");
  }
  if (config.trials < 1) throw ConfigError("trials", "must be at least 1");
  parse_split(config);
  const AlphaDistribution alpha = parse_alpha(config);
  if (config.eta >= 1.0 - alpha.support_hi()) {
    // Fairness experiments need headroom between the noise budget and the
    // strictest acceptance ratio; warn loudly but do not reject, since
    // degenerate settings are useful in tests.
    std::fprintf(stderr,
                 "qcs: warning: eta=%g is not below 1-alpha_hi=%g; the "
                 "protocol is not expected to stay fair\n",
                 config.eta, 1.0 - alpha.support_hi());
  }
  if (parse_split(config).kind == analysis::SplitModel::Kind::FixedEqual &&
      config.n % 2 != 0) {
    throw ConfigError("n", "fixed-equal split needs an even N");
  }
}

std::string config_json(const ExperimentConfig& config) {
  nlohmann::json doc;
  doc["version"] = std::string(kVersion);
  doc["n"] = config.n;
  if (!config.n_list.empty()) doc["n_list"] = config.n_list;
  doc["split"] = config.split;
  doc["alpha_kind"] = config.alpha_kind;
  if (config.alpha_kind == "uniform") {
    doc["alpha_lo"] = config.alpha_lo;
    doc["alpha_hi"] = config.alpha_hi;
  } else {
    doc["alpha_point"] = config.alpha_point;
  }
  doc["quad_tol"] = config.quad_tol;
  doc["noise"] = config.noise;
  doc["eta"] = config.eta;
  doc["strategy_alice"] = config.strategy_alice;
  doc["strategy_bob"] = config.strategy_bob;
  doc["intent_alice"] = config.intent_alice;
  doc["intent_bob"] = config.intent_bob;
  doc["trials"] = config.trials;
  doc["seed"] = config.seed;
  doc["format"] = config.format;
  return doc.dump();
}

AnalyzeOutcome run_analyze(const ExperimentConfig& config) {
  validate_common(config);
  const auto start = std::chrono::steady_clock::now();
  const analysis::FairnessCurve curve = analysis::sup_expected_cheat(
      config.n, parse_alpha(config), parse_split(config), config.quad_tol,
      config.threads);

  AnalyzeOutcome outcome;
  outcome.sup_m = curve.sup_m;
  outcome.sup_value = curve.sup_value;
  outcome.curve_csv_path = out_path(config, "curve.csv");
  outcome.summary_json_path = out_path(config, "summary.json");

  std::ostringstream csv;
  csv << "# config=" << config_json(config) << "\n";
  analysis::write_curve_csv(curve, csv);
  write_text_file(outcome.curve_csv_path, csv.str());

  nlohmann::json summary = nlohmann::json::parse(
      analysis::curve_summary_json(curve));
  summary["config"] = nlohmann::json::parse(config_json(config));
  write_text_file(outcome.summary_json_path, summary.dump(2) + "\n");

  log_wall_time("analyze", elapsed_seconds(start));
  return outcome;
}

SimulateOutcome run_simulate(const ExperimentConfig& config) {
  validate_common(config);
  const auto start = std::chrono::steady_clock::now();
  const std::uint32_t n = static_cast<std::uint32_t>(config.n);

  sim::TrialConfig trial_config;
  trial_config.n = n;
  trial_config.alice = parse_strategy(config.strategy_alice,
                                      config.intent_alice, n,
                                      "strategy_alice");
  trial_config.bob = parse_strategy(config.strategy_bob, config.intent_bob,
                                    n, "strategy_bob");
  trial_config.noise = {config.noise, config.eta};
  trial_config.alpha = parse_alpha(config);
  trial_config.trials = config.trials;
  trial_config.seed = config.seed;
  trial_config.threads = config.threads;

  SimulateOutcome outcome;
  outcome.report = sim::run_trials(trial_config);

  if (config.format == "csv") {
    outcome.report_path = out_path(config, "report.csv");
    std::ostringstream csv;
    csv << "# config=" << config_json(config) << "\n";
    csv << "# version=" << kVersion << "\n";
    sim::write_report_csv(outcome.report, csv);
    write_text_file(outcome.report_path, csv.str());
  } else {
    outcome.report_path = out_path(config, "report.json");
    nlohmann::json doc = nlohmann::json::parse(
        sim::report_json(outcome.report));
    doc["config"] = nlohmann::json::parse(config_json(config));
    write_text_file(outcome.report_path, doc.dump(2) + "\n");
  }

  if (trial_config.bob.kind != Strategy::Kind::Honest) {
    const std::uint32_t max_exposure = std::min<std::uint32_t>(n, 30);
    const sim::DetectionCurve curve = sim::estimate_detection_curve(
        trial_config.bob, n, max_exposure, config.trials, config.seed);
    outcome.detection_csv_path = out_path(config, "detection.csv");
    std::ostringstream csv;
    csv << "# config=" << config_json(config) << "\n";
    csv << "# version=" << kVersion << "\n";
    sim::write_detection_csv(curve, csv);
    write_text_file(outcome.detection_csv_path, csv.str());
  }

  log_wall_time("simulate", elapsed_seconds(start));
  return outcome;
}

ScalingOutcome run_scaling(const ExperimentConfig& config) {
  if (config.n_list.size() < 3) {
    throw ConfigError("n_list", "need at least three N values");
  }
  for (std::size_t i = 0; i < config.n_list.size(); ++i) {
    for (std::size_t j = i + 1; j < config.n_list.size(); ++j) {
      if (config.n_list[i] == config.n_list[j]) {
        throw ConfigError("n_list", "duplicate N value " +
                                        std::to_string(config.n_list[i]));
      }
    }
  }
  const analysis::SplitModel split = parse_split(config);
  const AlphaDistribution alpha = parse_alpha(config);
  for (long long n : config.n_list) {
    if (n < 1) throw ConfigError("n_list", "N values must be positive");
    if (split.kind == analysis::SplitModel::Kind::FixedEqual && n % 2 != 0) {
      throw ConfigError("n_list", "fixed-equal split needs even N values");
    }
  }

  const auto start = std::chrono::steady_clock::now();
  ScalingOutcome outcome;
  for (long long n : config.n_list) {
    const analysis::FairnessCurve curve = analysis::sup_expected_cheat(
        n, alpha, split, config.quad_tol, config.threads);
    outcome.points.emplace_back(static_cast<double>(n), curve.sup_value);
  }
  outcome.fit = analysis::scaling_fit(outcome.points);

  outcome.points_csv_path = out_path(config, "scaling_points.csv");
  std::ostringstream csv;
  csv << "# config=" << config_json(config) << "\n";
  csv << "# version=" << kVersion << "\n";
  csv << "n,sup_expected_cheat\n";
  char row[64];
  for (const auto& [n, sup] : outcome.points) {
    std::snprintf(row, sizeof(row), "%.0f,%.12e\n", n, sup);
    csv << row;
  }
  write_text_file(outcome.points_csv_path, csv.str());

  nlohmann::json fit_doc;
  fit_doc["config"] = nlohmann::json::parse(config_json(config));
  fit_doc["slope"] = outcome.fit.slope;
  fit_doc["intercept"] = outcome.fit.intercept;
  fit_doc["residual_norm"] = outcome.fit.residual_norm;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& [n, sup] : outcome.points) {
    points.push_back({{"n", n}, {"sup", sup}});
  }
  fit_doc["points"] = points;
  outcome.fit_json_path = out_path(config, "scaling_fit.json");
  write_text_file(outcome.fit_json_path, fit_doc.dump(2) + "\n");

  log_wall_time("scaling", elapsed_seconds(start));
  return outcome;
}

VerifyOutcome run_verify(const ExperimentConfig& config) {
  if (config.oracle_max_n < 1 || config.oracle_max_n > 16) {
    throw ConfigError("oracle_max_n", "must lie in 1..16");
  }
  if (config.trials < 1) throw ConfigError("trials", "must be at least 1");
  const auto start = std::chrono::steady_clock::now();

  VerifyOutcome outcome;
  const auto alphas = oracle::default_suite_alphas();
  const oracle::SuiteResult suite =
      oracle::run_suite(config.oracle_max_n, alphas);
  outcome.oracle_ok = suite.ok();
  outcome.oracle_checks = suite.checks;
  outcome.oracle_worst_rel = suite.worst_rel_error;

  const auto grid = sim::default_validation_grid();
  const auto cells = sim::validate_against_analysis(grid, config.trials,
                                                    config.seed,
                                                    config.threads);
  outcome.grid_cells = cells.size();
  for (const auto& cell : cells) outcome.grid_passes += cell.pass;
  outcome.grid_ok =
      outcome.grid_passes * 100 >= outcome.grid_cells * 95;

  outcome.grid_csv_path = out_path(config, "verify_grid.csv");
  std::ostringstream csv;
  csv << "# config=" << config_json(config) << "\n";
  csv << "# version=" << kVersion << "\n";
  sim::write_grid_csv(cells, csv);
  write_text_file(outcome.grid_csv_path, csv.str());

  nlohmann::json summary;
  summary["config"] = nlohmann::json::parse(config_json(config));
  summary["oracle"] = {{"checks", suite.checks},
                       {"failures", suite.failures},
                       {"worst_rel_error", suite.worst_rel_error},
                       {"max_n", config.oracle_max_n},
                       {"ok", suite.ok()}};
  summary["grid"] = {{"cells", outcome.grid_cells},
                     {"passes", outcome.grid_passes},
                     {"ok", outcome.grid_ok}};
  summary["ok"] = outcome.ok();
  outcome.summary_json_path = out_path(config, "verify_summary.json");
  write_text_file(outcome.summary_json_path, summary.dump(2) + "\n");

  log_wall_time("verify", elapsed_seconds(start));
  return outcome;
}

BindOutcome run_bind(const ExperimentConfig& config) {
  if (config.session_file.empty()) {
    throw ConfigError("session", "path to a persisted session is required");
  }
  if (config.claim_a_file.empty() || config.claim_b_file.empty()) {
    throw ConfigError("claims", "both claim files are required");
  }
  if (config.eta < 0.0 || config.eta >= 1.0) {
    throw ConfigError("eta", "tolerance must lie in [0, 1)");
  }

  const SessionRecord session =
      wire::decode_session(wire::read_file(config.session_file));

  auto load_claim = [](const std::string& path, Party expected) {
    const wire::WireMessage msg = wire::decode_message(wire::read_file(path));
    const auto* claim = std::get_if<wire::BindClaimMsg>(&msg.payload);
    if (claim == nullptr) {
      throw std::runtime_error(path + ": not a binding claim message");
    }
    if (claim->claim.party != expected) {
      throw std::runtime_error(path + ": claim is for the wrong party");
    }
    return claim->claim;
  };
  const BindingClaim claim_a = load_claim(config.claim_a_file, Party::Alice);
  const BindingClaim claim_b = load_claim(config.claim_b_file, Party::Bob);

  double alpha;
  if (config.use_alpha_point) {
    alpha = config.alpha_point;
  } else {
    Rng rng(config.seed);
    alpha = sample_alpha(parse_alpha(config), rng);
  }

  BindOutcome outcome;
  outcome.verdict =
      binding_verdict(session, claim_a, claim_b, alpha, config.eta);

  wire::WireMessage notice;
  notice.session_id = session.session_id;
  notice.payload = wire::VerdictNotice{outcome.verdict};
  outcome.verdict_bin_path = out_path(config, "verdict.bin");
  wire::write_file(outcome.verdict_bin_path, wire::encode_message(notice));

  nlohmann::json doc;
  doc["config"] = nlohmann::json::parse(config_json(config));
  doc["session_id"] = session.session_id;
  doc["contract_valid"] = outcome.verdict.contract_valid;
  doc["cheater"] = static_cast<int>(outcome.verdict.cheater);
  doc["alpha_used"] = outcome.verdict.alpha_used;
  doc["counts"] = {{"accept_correct_alice", outcome.verdict.accept_correct_alice},
                   {"reject_correct_alice", outcome.verdict.reject_correct_alice},
                   {"accept_correct_bob", outcome.verdict.accept_correct_bob},
                   {"reject_correct_bob", outcome.verdict.reject_correct_bob}};
  outcome.verdict_json_path = out_path(config, "verdict.json");
  write_text_file(outcome.verdict_json_path, doc.dump(2) + "\n");
  return outcome;
}

}  // namespace qcs::experiment
