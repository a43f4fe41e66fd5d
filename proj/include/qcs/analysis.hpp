#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcs/alpha_distribution.hpp"
#include "qcs/logprob.hpp"

namespace qcs::analysis {

// How the N qubits divide between accept- and reject-basis preparations:
// binomially random (the protocol's actual distribution) or pinned to
// equal halves (the "typical" restricted case, which needs even N).
struct SplitModel {
  enum class Kind { Binomial, FixedEqual };

  Kind kind = Kind::Binomial;

  static SplitModel binomial() { return {Kind::Binomial}; }
  static SplitModel fixed_equal() { return {Kind::FixedEqual}; }

  const char* name() const {
    return kind == Kind::Binomial ? "binomial" : "fixed-equal";
  }
};

// 2^{-n} * sum_{i=0}^{min(t,n)} C(n, i). Exact zero for t < 0.
LogProb binom_tail(long long n, long long t);

// Probability that n accept-observable results on reject-basis qubits
// leave a rejection claim alive: at most T of them wrong, where T is the
// shared allowed_wrong_count(alpha, n_reject) threshold.
LogProb reject_ability(long long n, double alpha, long long n_reject);

// P(exactly n of the first m positions fall on reject-basis qubits),
// given n_reject of the total positions are reject-basis.
LogProb hypergeom_pmf(long long n, long long m, long long n_reject,
                      long long total);

// Probability that a party who measured the accept observable on the
// first m qubits can still reject, for fixed n_reject. Equals one when
// m lies below (1-alpha)*n_reject; zero when n_reject == 0.
LogProb prob_reject(long long m, double alpha, long long n_reject,
                    long long total);

// Split-averaged version of prob_reject.
LogProb prob_reject_avg(long long m, double alpha, long long total,
                        SplitModel split);

// P_ch(m; alpha) = P_R * (1 - P_R) of the split-averaged reject
// probability; never exceeds 1/4.
LogProb prob_cheat(long long m, double alpha, long long total,
                   SplitModel split);

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
  bool converged = true;
  int max_doublings_used = 0;
};

// Expected probability to cheat under p(alpha): integral of
// p(alpha) * P_ch(m; alpha), split at every alpha where the integer
// reject threshold jumps, each smooth piece integrated by Gauss-Legendre
// with node doubling until successive estimates differ by less than
// quad_tol (scaled per piece). Caps at 20 doublings and reports the best
// estimate with its error bound rather than throwing.
QuadratureResult expected_prob_cheat_full(long long m, long long total,
                                          const AlphaDistribution& alpha_dist,
                                          SplitModel split, double quad_tol);
double expected_prob_cheat(long long m, long long total,
                           const AlphaDistribution& alpha_dist,
                           SplitModel split, double quad_tol = 1e-5);

struct FairnessCurve {
  long long total = 0;
  SplitModel split;
  AlphaDistribution alpha_dist = AlphaDistribution::uniform(0.9, 0.99);
  double quad_tol = 1e-5;
  std::vector<double> values;  // expected cheat probability, m = 0..N
  long long sup_m = 0;
  double sup_value = 0.0;
  bool quadrature_converged = true;
};

// Full sweep m = 0..N. Ties resolve to the smallest m. Parallelizes over
// m internally; results are identical to a serial evaluation.
FairnessCurve sup_expected_cheat(long long total,
                                 const AlphaDistribution& alpha_dist,
                                 SplitModel split, double quad_tol = 1e-5,
                                 unsigned threads = 0);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
};

// Least-squares fit of log(sup) against log(N). Needs at least three
// points with distinct N.
PowerLawFit scaling_fit(std::span<const std::pair<double, double>> points);

// Detection laws: probability that a cheater is caught within delta_m
// reject measurements, and within k_a rotated measurements on
// accept-basis qubits (q_a = cos theta).
double detection_prob(long long delta_m);
double detection_prob_rotated(long long k_a, double q_a);
// Exact per-qubit product form; coincides with the above at q_a in {0,1}.
double detection_prob_rotated_exact(long long k_a, double q_a);

struct ChebyshevCheck {
  bool precondition_holds = false;  // E(Y) <= delta^3
  double expected_cheat = 0.0;      // E(Y)
  double threshold = 0.0;           // delta + delta^3
  double prob_below = 0.0;          // Prob_alpha[Y < threshold]
  bool bound_satisfied = false;     // prob_below >= 1 - delta
};

// Verifies Prob_alpha[Y < delta + delta^3] >= 1 - delta for
// Y(alpha) = P_ch(m; alpha), claimed only when E(Y) <= delta^3.
ChebyshevCheck chebyshev_risk_check(long long total, long long m, double delta,
                                    const AlphaDistribution& alpha_dist,
                                    SplitModel split, double quad_tol = 1e-5);

// Diagnostic: strategy-averaged cheat probability
// sum_w w(delta_m) * [1 - P_R(m)] * P_R(m - delta_m) for a caller-supplied
// distribution over the number of reject measurements delta_m.
double prob_cheat_strategy_avg(
    long long m, double alpha, long long total, SplitModel split,
    std::span<const std::pair<long long, double>> delta_m_weights);

// Plot-ready exports: CSV columns (m, expected cheat probability) and a
// JSON summary with the full settings and the supremum.
void write_curve_csv(const FairnessCurve& curve, std::ostream& out);
std::string curve_summary_json(const FairnessCurve& curve);
std::string alpha_dist_label(const AlphaDistribution& dist);

}  // namespace qcs::analysis
