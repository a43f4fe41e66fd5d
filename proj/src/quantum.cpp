#include "qcs/quantum.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qcs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::array<std::complex<double>, 2> rotated_axis(double theta, double phi) {
  return {std::complex<double>(std::cos(theta / 2.0), 0.0),
          std::polar(std::sin(theta / 2.0), phi)};
}

double overlap_probability(const std::array<std::complex<double>, 2>& a,
                           const std::array<std::complex<double>, 2>& b) {
  const std::complex<double> dot = std::conj(a[0]) * b[0] +
                                   std::conj(a[1]) * b[1];
  return std::norm(dot);
}

}  // namespace

std::array<std::complex<double>, 2> state_amplitudes(QubitDescriptor state) {
  if (state.basis() == Basis::Accept) {
    return state.state_bit ? std::array<std::complex<double>, 2>{0.0, 1.0}
                           : std::array<std::complex<double>, 2>{1.0, 0.0};
  }
  // |+> = (|1> + |0>)/sqrt(2), |-> = (|1> - |0>)/sqrt(2)
  if (state.state_bit) {
    return {kInvSqrt2, kInvSqrt2};
  }
  return {-kInvSqrt2, kInvSqrt2};
}

std::vector<QubitDescriptor> prepare_sequence(std::size_t n, Rng& rng) {
  if (n == 0) {
    throw std::invalid_argument("prepare_sequence: empty sequence requested");
  }
  std::vector<QubitDescriptor> out(n);
  for (auto& q : out) {
    const auto bits = rng.next_below(4);
    q.basis_bit = static_cast<std::uint8_t>(bits >> 1);
    q.state_bit = static_cast<std::uint8_t>(bits & 1);
  }
  return out;
}

OutcomeDistribution outcome_distribution(QubitDescriptor state,
                                         const Observable& obs) {
  if (obs.kind != Observable::Kind::Rotated) {
    const Basis measured =
        obs.kind == Observable::Kind::Accept ? Basis::Accept : Basis::Reject;
    if (state.basis() == measured) {
      // Matched basis: the outcome reproduces the state bit.
      return state.state_bit ? OutcomeDistribution{0.0, 1.0}
                             : OutcomeDistribution{1.0, 0.0};
    }
    // Mutually unbiased bases: both outcomes exactly equally likely.
    return {0.5, 0.5};
  }

  const auto psi = state_amplitudes(state);
  const auto axis0 = rotated_axis(obs.theta, obs.phi);
  // |m_perp> orthogonal to |m>; its global phase is irrelevant.
  const std::array<std::complex<double>, 2> axis1 = {
      -std::conj(axis0[1]), std::conj(axis0[0])};
  return {overlap_probability(axis0, psi), overlap_probability(axis1, psi)};
}

int measure(QubitDescriptor state, const Observable& obs,
            const NoiseModel& noise, Rng& rng) {
  const auto dist = outcome_distribution(state, obs);
  int outcome = rng.next_double() < dist.p1 ? 1 : 0;
  if (noise.flip_prob > 0.0 && rng.bernoulli(noise.flip_prob)) {
    outcome ^= 1;
  }
  return outcome;
}

}  // namespace qcs
