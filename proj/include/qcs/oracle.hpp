#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <span>
#include <vector>

namespace qcs::oracle {

// Exact-rational brute-force reference for the fairness numerics at
// small N. Everything here is enumerated: basis assignments are walked
// as bitmasks, outcome patterns as bitmasks, and the acceptance ratio is
// an exact fraction. Deliberately shares no code with the log-space
// implementation it cross-checks.

using Rational = boost::rational<long long>;

struct RationalAlpha {
  long long num = 9;
  long long den = 10;
  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

// Largest integer strictly below (1 - alpha) * n_reject.
long long allowed_wrong_exact(RationalAlpha alpha, long long n_reject);

// P(at most t of n fair bits set), by enumerating all 2^n patterns.
Rational binom_tail_exact(long long n, long long t);

// Hypergeometric pmf by counting position sets.
Rational hypergeom_exact(long long n, long long m, long long n_reject,
                         long long total);

// Probability that measuring the accept observable on the first m qubits
// leaves a rejection claim alive, for a fixed reject-basis count.
Rational prob_reject_exact(long long m, RationalAlpha alpha,
                           long long n_reject, long long total);

// The same, averaged over the uniform basis assignment of all qubits.
Rational prob_reject_avg_exact(long long m, RationalAlpha alpha,
                               long long total);

struct SuiteResult {
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst_rel_error = 0.0;
  long long worst_n = 0, worst_m = 0, worst_n_reject = -1;
  double worst_alpha = 0.0;
  bool ok() const { return failures == 0; }
};

// Compares the log-space prob_reject / prob_reject_avg implementation
// against the enumerated values for every (N <= max_n, m, n_reject) and
// each alpha, at the given relative tolerance.
SuiteResult run_suite(long long max_n, std::span<const RationalAlpha> alphas,
                      double rel_tol = 1e-12);

std::vector<RationalAlpha> default_suite_alphas();

}  // namespace qcs::oracle
