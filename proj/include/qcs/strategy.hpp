#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>

#include "qcs/quantum.hpp"

namespace qcs {

// What a client does during the exchange, round by round, plus what it
// wants once the exchange stops. Round sets are 1-based.
struct Strategy {
  enum class Kind : std::uint8_t {
    Honest,        // accept observable every round
    AlwaysReject,  // reject observable every round
    MixedReject,   // reject observable on the listed rounds
    Rotated,       // rotated observable on the listed rounds
    Guesser        // reports random bits, leaves qubits unmeasured
  };
  enum class Intent : std::uint8_t { Bind, Refuse };

  Kind kind = Kind::Honest;
  Intent intent = Intent::Bind;
  std::set<std::uint32_t> rounds;  // MixedReject / Rotated only
  double theta = 0.0;
  double phi = 0.0;

  static Strategy honest(Intent intent = Intent::Bind) {
    Strategy s;
    s.intent = intent;
    return s;
  }
  static Strategy always_reject(Intent intent = Intent::Refuse) {
    Strategy s;
    s.kind = Kind::AlwaysReject;
    s.intent = intent;
    return s;
  }
  static Strategy mixed_reject(std::set<std::uint32_t> rounds,
                               Intent intent = Intent::Refuse) {
    Strategy s;
    s.kind = Kind::MixedReject;
    s.rounds = std::move(rounds);
    s.intent = intent;
    return s;
  }
  static Strategy rotated(double theta, double phi,
                          std::set<std::uint32_t> rounds,
                          Intent intent = Intent::Bind) {
    Strategy s;
    s.kind = Kind::Rotated;
    s.theta = theta;
    s.phi = phi;
    s.rounds = std::move(rounds);
    s.intent = intent;
    return s;
  }
  static Strategy guesser(Intent intent = Intent::Bind) {
    Strategy s;
    s.kind = Kind::Guesser;
    s.intent = intent;
    return s;
  }

  void validate(std::uint32_t n) const {
    if (kind == Kind::MixedReject || kind == Kind::Rotated) {
      for (std::uint32_t r : rounds) {
        if (r < 1 || r > n) {
          throw std::invalid_argument(
              "strategy: round indices must lie in 1..N");
        }
      }
    }
  }

  bool uses_round(std::uint32_t round) const {
    return rounds.count(round) > 0;
  }
};

}  // namespace qcs
