#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qcs/alpha_distribution.hpp"
#include "qcs/quantum.hpp"
#include "qcs/rng.hpp"
#include "qcs/strategy.hpp"

namespace qcs {

enum class Party : std::uint8_t { Alice = 0, Bob = 1 };

inline Party other(Party p) {
  return p == Party::Alice ? Party::Bob : Party::Alice;
}

// Trent's full preparation ledger for one contract. The cross bits are
// the exact classical descriptors of the opposite client's qubits,
// handed out at initialization so each side can check the other's
// reported outcomes.
struct SessionRecord {
  std::uint64_t session_id = 0;
  std::uint32_t qubit_count = 0;  // N, per client
  std::vector<QubitDescriptor> alice_qubits;
  std::vector<QubitDescriptor> bob_qubits;
  std::vector<QubitDescriptor> alice_cross_bits;  // copy of bob_qubits
  std::vector<QubitDescriptor> bob_cross_bits;    // copy of alice_qubits
  std::uint64_t round_deadline = 0;  // t0: round budget in-memory,
                                     // per-round wall-clock on sockets

  friend bool operator==(const SessionRecord&,
                         const SessionRecord&) = default;
};

SessionRecord init_session(std::uint32_t n, Rng& rng);

// Builds a session from fixed preparations (exhaustive tests, replay).
SessionRecord make_session(std::uint64_t session_id,
                           std::vector<QubitDescriptor> alice,
                           std::vector<QubitDescriptor> bob);

enum class AbortReason : std::uint8_t {
  None = 0,
  MismatchDetected = 1,
  Timeout = 2,
  TransportFailure = 3
};

const char* abort_reason_name(AbortReason reason);

struct TranscriptEntry {
  Party party;
  std::uint32_t index;  // 1-based round index, one per party per index
  std::uint8_t outcome;
};

struct ExchangeTranscript {
  std::vector<TranscriptEntry> rounds;
  std::optional<std::uint32_t> abort_step;
  AbortReason abort_reason = AbortReason::None;
  // Which side stopped, when aborted.
  std::optional<Party> aborted_by;
};

// How each party actually handled each of its qubits; needed to build
// binding claims after the exchange.
enum class MeasurementKind : std::uint8_t {
  Unmeasured = 0,
  AcceptBasis = 1,
  RejectBasis = 2,
  RotatedObs = 3,
  GuessedOnly = 4  // a bit was reported but the qubit is untouched
};

struct PartyRecord {
  struct Entry {
    MeasurementKind kind = MeasurementKind::Unmeasured;
    std::uint8_t outcome = 0;
    double theta = 0.0;
    double phi = 0.0;
  };
  std::vector<Entry> entries;
  std::uint32_t mismatches_seen = 0;  // in the opponent's reports
};

struct ExchangeResult {
  ExchangeTranscript transcript;
  PartyRecord alice;
  PartyRecord bob;
};

// Runs the alternating exchange in memory: Alice reports first at every
// index. A party aborts once the opponent's accept-basis mismatches
// exceed the running budget floor(eta * reports_seen), or when the round
// deadline runs out.
ExchangeResult run_exchange(const SessionRecord& session,
                            const Strategy& strat_alice,
                            const Strategy& strat_bob,
                            const NoiseModel& noise, Rng& rng);

struct BindingClaim {
  Party party = Party::Alice;
  // One claimed basis per qubit: true = accept, false = reject.
  std::vector<std::uint8_t> claimed_accept;
  std::vector<std::uint8_t> outcomes;

  friend bool operator==(const BindingClaim&, const BindingClaim&) = default;
};

// Completes the unmeasured qubits per the party's post-abort intent
// (bind -> accept basis, refuse -> reject basis) and assembles the
// claim. Rotated measurements are claimed as the intent basis.
BindingClaim finish_and_claim(const SessionRecord& session, Party party,
                              const PartyRecord& record,
                              Strategy::Intent intent,
                              const NoiseModel& noise, Rng& rng);

enum class CheaterFlag : std::uint8_t {
  None = 0,
  Alice = 1,
  Bob = 2,
  Both = 3
};

struct Verdict {
  bool contract_valid = false;
  CheaterFlag cheater = CheaterFlag::None;
  double alpha_used = 0.0;
  std::uint32_t accept_correct_alice = 0;
  std::uint32_t reject_correct_alice = 0;
  std::uint32_t accept_correct_bob = 0;
  std::uint32_t reject_correct_bob = 0;
  // Threshold outcomes, convenient for analysis cross-checks.
  bool alice_accepts = false;
  bool alice_rejects = false;
  bool bob_accepts = false;
  bool bob_rejects = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

// Trent's verdict: a party whose matched-basis claims disagree with the
// preparation record beyond ceil(eta * checked) is flagged and its claim
// ignored; otherwise the contract is valid when one side proves
// acceptance while the other fails to prove rejection.
Verdict binding_verdict(const SessionRecord& session,
                        const BindingClaim& claim_alice,
                        const BindingClaim& claim_bob, double alpha,
                        double eta);

// Trent's acceptance-ratio draw at binding time.
double sample_alpha(const AlphaDistribution& dist, Rng& rng);

}  // namespace qcs
