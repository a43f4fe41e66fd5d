#include "qcs/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "qcs/analysis.hpp"

namespace qcs::oracle {

namespace {

constexpr long long kMaxN = 16;

void require_small(long long total) {
  if (total < 0 || total > kMaxN) {
    throw std::invalid_argument("oracle: N must stay within brute-force range");
  }
}

long long popcount(std::uint64_t v) { return std::popcount(v); }

// tails[n][t + 1] = #patterns of n bits with at most t bits set, for
// t = -1 .. n, counted by walking every pattern once at startup.
const std::vector<std::vector<long long>>& tail_counts() {
  static std::vector<std::vector<long long>> counts;
  static std::once_flag once;
  std::call_once(once, [] {
    counts.resize(kMaxN + 1);
    for (long long n = 0; n <= kMaxN; ++n) {
      counts[n].assign(static_cast<std::size_t>(n) + 2, 0);
      const std::uint64_t patterns = 1ull << n;
      for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
        const long long wrong = popcount(pattern);
        for (long long t = wrong; t <= n; ++t) {
          ++counts[n][static_cast<std::size_t>(t) + 1];
        }
      }
    }
  });
  return counts;
}

Rational pattern_tail(long long n, long long t) {
  if (t < 0) return Rational(0);
  const auto& counts = tail_counts();
  const long long capped = std::min(t, n);
  return Rational(counts[n][static_cast<std::size_t>(capped) + 1],
                  1ll << n);
}

}  // namespace

long long allowed_wrong_exact(RationalAlpha alpha, long long n_reject) {
  // (1 - num/den) * n_reject = (den - num) * n_reject / den
  const long long p = (alpha.den - alpha.num) * n_reject;
  const long long q = alpha.den;
  return (p % q == 0) ? p / q - 1 : p / q;
}

Rational binom_tail_exact(long long n, long long t) {
  require_small(n);
  return pattern_tail(n, t);
}

Rational hypergeom_exact(long long n, long long m, long long n_reject,
                         long long total) {
  require_small(total);
  const std::uint64_t first_m = (1ull << m) - 1;
  long long matching = 0, all = 0;
  for (std::uint64_t mask = 0; mask < (1ull << total); ++mask) {
    if (popcount(mask) != n_reject) continue;
    ++all;
    if (popcount(mask & first_m) == n) ++matching;
  }
  if (all == 0) return Rational(0);
  return Rational(matching, all);
}

Rational prob_reject_exact(long long m, RationalAlpha alpha,
                           long long n_reject, long long total) {
  require_small(total);
  if (m < 0 || m > total || n_reject < 0 || n_reject > total) {
    throw std::invalid_argument("oracle: counts out of range");
  }
  const long long t = allowed_wrong_exact(alpha, n_reject);
  const std::uint64_t first_m = (1ull << m) - 1;
  Rational sum(0);
  long long assignments = 0;
  for (std::uint64_t mask = 0; mask < (1ull << total); ++mask) {
    if (popcount(mask) != n_reject) continue;
    ++assignments;
    sum += pattern_tail(popcount(mask & first_m), t);
  }
  if (assignments == 0) return Rational(0);
  return sum / assignments;
}

Rational prob_reject_avg_exact(long long m, RationalAlpha alpha,
                               long long total) {
  require_small(total);
  const std::uint64_t first_m = (1ull << m) - 1;
  Rational sum(0);
  for (std::uint64_t mask = 0; mask < (1ull << total); ++mask) {
    const long long t = allowed_wrong_exact(alpha, popcount(mask));
    sum += pattern_tail(popcount(mask & first_m), t);
  }
  return sum / (1ll << total);
}

SuiteResult run_suite(long long max_n, std::span<const RationalAlpha> alphas,
                      double rel_tol) {
  require_small(max_n);
  SuiteResult result;

  auto compare = [&](double impl, const Rational& exact, long long n,
                     long long m, long long n_reject, double alpha) {
    const double reference = boost::rational_cast<double>(exact);
    const double scale = std::max(std::abs(reference), 1e-300);
    const double rel = std::abs(impl - reference) / scale;
    ++result.checks;
    if (rel > result.worst_rel_error) {
      result.worst_rel_error = rel;
      result.worst_n = n;
      result.worst_m = m;
      result.worst_n_reject = n_reject;
      result.worst_alpha = alpha;
    }
    if (rel > rel_tol) ++result.failures;
  };

  for (long long n = 1; n <= max_n; ++n) {
    for (const RationalAlpha& alpha : alphas) {
      for (long long m = 0; m <= n; ++m) {
        for (long long n_reject = 0; n_reject <= n; ++n_reject) {
          compare(analysis::prob_reject(m, alpha.value(), n_reject, n)
                      .linear(),
                  prob_reject_exact(m, alpha, n_reject, n), n, m, n_reject,
                  alpha.value());
        }
        compare(analysis::prob_reject_avg(m, alpha.value(), n,
                                          analysis::SplitModel::binomial())
                    .linear(),
                prob_reject_avg_exact(m, alpha, n), n, m, -1, alpha.value());
      }
    }
  }
  return result;
}

std::vector<RationalAlpha> default_suite_alphas() {
  return {{11, 20}, {7, 10}, {9, 10}};
}

}  // namespace qcs::oracle
