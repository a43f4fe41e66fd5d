#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "qcs/rng.hpp"

namespace qcs {

// Preparation basis of a qubit: C_b = 1 selects the accept basis
// {|0>, |1>}, C_b = 0 the reject basis {|->, |+>}.
enum class Basis : std::uint8_t { Reject = 0, Accept = 1 };

// Classical record (C_b, C_s) of one prepared qubit state. The state bit
// picks |1> or |+> when set, |0> or |-> when clear.
struct QubitDescriptor {
  std::uint8_t basis_bit = 0;
  std::uint8_t state_bit = 0;

  Basis basis() const {
    return basis_bit ? Basis::Accept : Basis::Reject;
  }

  friend bool operator==(const QubitDescriptor&,
                         const QubitDescriptor&) = default;
};

// Single-qubit observable. Accept and Reject are the two protocol
// observables; Rotated(theta, phi) measures the basis
// {|m>, |m_perp>}, |m> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>,
// with outcome 0 assigned to |m> so that Rotated(0, 0) labels outcomes
// like the accept observable.
struct Observable {
  enum class Kind : std::uint8_t { Accept = 0, Reject = 1, Rotated = 2 };

  Kind kind = Kind::Accept;
  double theta = 0.0;
  double phi = 0.0;

  static Observable accept() { return {Kind::Accept, 0.0, 0.0}; }
  static Observable reject() { return {Kind::Reject, 0.0, 0.0}; }
  static Observable rotated(double theta, double phi) {
    return {Kind::Rotated, theta, phi};
  }
};

struct OutcomeDistribution {
  double p0 = 0.0;
  double p1 = 0.0;
};

// Reported-outcome corruption: channel noise and detector error folded
// into a single flip probability. `tolerance` is the error ratio eta the
// parties budget for when checking each other's reports.
struct NoiseModel {
  double flip_prob = 0.0;
  double tolerance = 0.0;

  static NoiseModel ideal() { return {0.0, 0.0}; }
};

// State amplitudes in the {|0>, |1>} basis.
std::array<std::complex<double>, 2> state_amplitudes(QubitDescriptor state);

// i.i.d. uniform draw over the four preparations. Throws on n == 0.
std::vector<QubitDescriptor> prepare_sequence(std::size_t n, Rng& rng);

// Born-rule outcome probabilities for measuring `obs` on `state`.
// Matched accept/reject measurements give an exact point mass on the
// state bit; crossed ones give exactly (1/2, 1/2).
OutcomeDistribution outcome_distribution(QubitDescriptor state,
                                         const Observable& obs);

// Samples an outcome, then flips the report with probability
// noise.flip_prob.
int measure(QubitDescriptor state, const Observable& obs,
            const NoiseModel& noise, Rng& rng);

}  // namespace qcs
