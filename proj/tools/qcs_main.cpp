#include <csignal>
#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "qcs/experiment.hpp"
#include "qcs/transport.hpp"
#include "qcs/version.hpp"
#include "qcs/wire.hpp"

namespace {

// Exit codes: 0 success, 1 validation error, 2 verification failure,
// 3 I/O error.
enum ExitCode {
  kOk = 0,
  kValidationError = 1,
  kVerificationFailure = 2,
  kIoError = 3
};

volatile std::sig_atomic_t g_stop_requested = 0;

void handle_signal(int) { g_stop_requested = 1; }

void add_common_options(CLI::App* cmd, qcs::experiment::ExperimentConfig& c) {
  cmd->add_option("--n", c.n, "Qubit pairs per client");
  cmd->add_option("--split", c.split, "Split model: binomial | fixed-equal");
  cmd->add_option("--alpha-lo", c.alpha_lo, "Uniform alpha lower bound");
  cmd->add_option("--alpha-hi", c.alpha_hi, "Uniform alpha upper bound");
  cmd->add_option("--alpha-point", c.alpha_point,
                  "Point-mass alpha (switches kind to 'point')")
      ->each([&c](const std::string&) { c.alpha_kind = "point"; });
  cmd->add_option("--quad-tol", c.quad_tol, "Quadrature tolerance");
  cmd->add_option("--noise", c.noise, "Outcome flip probability e");
  cmd->add_option("--eta", c.eta, "Error tolerance eta");
  cmd->add_option("--trials", c.trials, "Monte Carlo trials");
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = auto)");
  cmd->add_option("--out", c.out_dir, "Output directory");
  cmd->add_option("--format", c.format, "Report format: json | csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum contract-signing fairness toolkit"};
  app.set_version_flag("--version", std::string(qcs::kVersion));
  app.set_config("--config", "", "Config file (INI-style key=value)");
  app.require_subcommand(1);

  qcs::experiment::ExperimentConfig config;

  auto* analyze = app.add_subcommand(
      "analyze", "Exact expected-cheat curve and its supremum");
  add_common_options(analyze, config);

  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo protocol runs under strategy profiles");
  add_common_options(simulate, config);
  simulate->add_option("--strategy-a", config.strategy_alice,
                       "honest | always-reject | mixed-reject:<rounds> | "
                       "rotated:<theta>,<phi>:<rounds|all> | guesser");
  simulate->add_option("--strategy-b", config.strategy_bob, "Bob's strategy");
  simulate->add_option("--intent-a", config.intent_alice, "bind | refuse");
  simulate->add_option("--intent-b", config.intent_bob, "bind | refuse");

  auto* scaling = app.add_subcommand(
      "scaling", "Supremum scaling fit across a list of N");
  add_common_options(scaling, config);
  scaling->add_option("--n-list", config.n_list, "N values (three or more)")
      ->delimiter(',');

  auto* verify = app.add_subcommand(
      "verify", "Exact-oracle and Monte Carlo self-checks");
  add_common_options(verify, config);
  verify->add_option("--oracle-max-n", config.oracle_max_n,
                     "Brute-force oracle range (<= 16)");

  auto* serve = app.add_subcommand(
      "serve", "Run the trusted-party endpoint over TCP");
  add_common_options(serve, config);
  serve->add_option("--port", config.port, "Listen port (0 = ephemeral)");

  auto* bind = app.add_subcommand(
      "bind", "Offline binding from a persisted session and two claims");
  add_common_options(bind, config);
  bind->add_option("--session", config.session_file, "Session record file")
      ->required();
  bind->add_option("--claim-a", config.claim_a_file, "Alice's claim frame")
      ->required();
  bind->add_option("--claim-b", config.claim_b_file, "Bob's claim frame")
      ->required();

  CLI11_PARSE(app, argc, argv);
  config.use_alpha_point = config.alpha_kind == "point";

  try {
    if (analyze->parsed()) {
      const auto outcome = qcs::experiment::run_analyze(config);
      std::printf("n=%lld split=%s sup at m*=%lld value=%.6f\n", config.n,
                  config.split.c_str(), outcome.sup_m, outcome.sup_value);
      std::printf("curve: %s\nsummary: %s\n", outcome.curve_csv_path.c_str(),
                  outcome.summary_json_path.c_str());
      return kOk;
    }
    if (simulate->parsed()) {
      const auto outcome = qcs::experiment::run_simulate(config);
      std::printf("trials=%llu p_valid=%.6f p_bind_alice=%.6f "
                  "p_bind_bob=%.6f\n",
                  static_cast<unsigned long long>(outcome.report.trials),
                  outcome.report.p_valid, outcome.report.p_bind_alice,
                  outcome.report.p_bind_bob);
      std::printf("report: %s\n", outcome.report_path.c_str());
      if (!outcome.detection_csv_path.empty()) {
        std::printf("detection curve: %s\n",
                    outcome.detection_csv_path.c_str());
      }
      return kOk;
    }
    if (scaling->parsed()) {
      const auto outcome = qcs::experiment::run_scaling(config);
      std::printf("slope=%.4f intercept=%.4f residual=%.4g\n",
                  outcome.fit.slope, outcome.fit.intercept,
                  outcome.fit.residual_norm);
      std::printf("points: %s\nfit: %s\n", outcome.points_csv_path.c_str(),
                  outcome.fit_json_path.c_str());
      return kOk;
    }
    if (verify->parsed()) {
      const auto outcome = qcs::experiment::run_verify(config);
      std::printf("oracle: %zu checks, worst rel error %.3g, %s\n",
                  outcome.oracle_checks, outcome.oracle_worst_rel,
                  outcome.oracle_ok ? "ok" : "FAILED");
      std::printf("grid: %zu/%zu cells within 4 sigma, %s\n",
                  outcome.grid_passes, outcome.grid_cells,
                  outcome.grid_ok ? "ok" : "FAILED");
      std::printf("grid table: %s\nsummary: %s\n",
                  outcome.grid_csv_path.c_str(),
                  outcome.summary_json_path.c_str());
      return outcome.ok() ? kOk : kVerificationFailure;
    }
    if (serve->parsed()) {
      qcs::experiment::validate_common(config);
      qcs::transport::TrentConfig trent_config;
      trent_config.seed = config.seed;
      trent_config.alpha = qcs::experiment::parse_alpha(config);
      trent_config.eta = config.eta;
      trent_config.session_dir = config.out_dir;
      qcs::transport::TrentServer server(config.port, trent_config);
      std::printf("trent listening on 127.0.0.1:%u, sessions in %s\n",
                  server.bound_port(), config.out_dir.c_str());
      std::fflush(stdout);
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      while (!g_stop_requested) {
        struct timespec ts{0, 100 * 1000 * 1000};
        nanosleep(&ts, nullptr);
      }
      server.stop();
      return kOk;
    }
    if (bind->parsed()) {
      const auto outcome = qcs::experiment::run_bind(config);
      std::printf("contract_valid=%d cheater=%d alpha=%.6f\n",
                  outcome.verdict.contract_valid ? 1 : 0,
                  static_cast<int>(outcome.verdict.cheater),
                  outcome.verdict.alpha_used);
      std::printf("verdict: %s (%s)\n", outcome.verdict_bin_path.c_str(),
                  outcome.verdict_json_path.c_str());
      return kOk;
    }
  } catch (const qcs::experiment::ConfigError& error) {
    std::fprintf(stderr, "qcs: invalid config: %s\n", error.what());
    return kValidationError;
  } catch (const std::invalid_argument& error) {
    std::fprintf(stderr, "qcs: invalid argument: %s\n", error.what());
    return kValidationError;
  } catch (const qcs::wire::DecodeError& error) {
    std::fprintf(stderr, "qcs: decode error: %s\n", error.what());
    return kIoError;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "qcs: error: %s\n", error.what());
    return kIoError;
  }
  return kValidationError;
}
