#pragma once

#include <cmath>

namespace qcs {

// Integer thresholds shared by the binding verdict and the fairness
// numerics. Both sides must agree bit-for-bit on these, so they live in
// one place.
//
// Products like alpha * count are snapped to the nearest integer when
// they land within rounding distance of one, so that e.g. 0.9 * 10
// (which is 9.000000000000002 in binary) behaves as the intended 9.

inline long long snapped_ceil(double x) {
  const double r = std::nearbyint(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<long long>(r);
  }
  return static_cast<long long>(std::ceil(x));
}

inline long long snapped_floor(double x) {
  const double r = std::nearbyint(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<long long>(r);
  }
  return static_cast<long long>(std::floor(x));
}

// Test hook: offsets the reject threshold so the self-check command can
// demonstrate that a perturbed convention is caught. Zero in normal use.
long long threshold_perturbation();

// Largest number of wrong reject-basis results that still permits a
// rejection claim: the greatest integer strictly below (1-alpha)*n_reject.
// -1 when n_reject == 0 (no reject-basis qubits means nothing to present,
// so rejection is impossible).
inline long long allowed_wrong_count(double alpha, long long n_reject) {
  const long long t =
      snapped_ceil((1.0 - alpha) * static_cast<double>(n_reject)) - 1;
  return t + threshold_perturbation();
}

// Minimum number of correct accept-basis results: "at least alpha * N_A".
inline long long required_accept_count(double alpha, long long n_accept) {
  return snapped_ceil(alpha * static_cast<double>(n_accept));
}

inline bool rejection_succeeds(long long wrong, double alpha,
                               long long n_reject) {
  return wrong <= allowed_wrong_count(alpha, n_reject);
}

inline bool acceptance_succeeds(long long correct, double alpha,
                                long long n_accept) {
  return correct >= required_accept_count(alpha, n_accept);
}

}  // namespace qcs
