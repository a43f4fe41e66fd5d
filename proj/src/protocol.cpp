#include "qcs/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "qcs/thresholds.hpp"

namespace qcs {

namespace {

Observable observable_for_round(const Strategy& strat, std::uint32_t round) {
  switch (strat.kind) {
    case Strategy::Kind::Honest:
      return Observable::accept();
    case Strategy::Kind::AlwaysReject:
      return Observable::reject();
    case Strategy::Kind::MixedReject:
      return strat.uses_round(round) ? Observable::reject()
                                     : Observable::accept();
    case Strategy::Kind::Rotated:
      return strat.uses_round(round)
                 ? Observable::rotated(strat.theta, strat.phi)
                 : Observable::accept();
    case Strategy::Kind::Guesser:
      return Observable::accept();  // unused; guesser never measures here
  }
  return Observable::accept();
}

MeasurementKind kind_of(const Observable& obs) {
  switch (obs.kind) {
    case Observable::Kind::Accept:
      return MeasurementKind::AcceptBasis;
    case Observable::Kind::Reject:
      return MeasurementKind::RejectBasis;
    case Observable::Kind::Rotated:
      return MeasurementKind::RotatedObs;
  }
  return MeasurementKind::AcceptBasis;
}

// One party's move at a round: measure (or guess) its own qubit and
// produce the reported outcome.
std::uint8_t play_round(const Strategy& strat, std::uint32_t round,
                        const SessionRecord& session, Party who,
                        PartyRecord& record, const NoiseModel& noise,
                        Rng& rng) {
  const auto& qubits =
      who == Party::Alice ? session.alice_qubits : session.bob_qubits;
  auto& entry = record.entries[round - 1];
  if (strat.kind == Strategy::Kind::Guesser) {
    entry.kind = MeasurementKind::GuessedOnly;
    entry.outcome = static_cast<std::uint8_t>(rng.next_below(2));
    return entry.outcome;
  }
  const Observable obs = observable_for_round(strat, round);
  const int outcome = measure(qubits[round - 1], obs, noise, rng);
  entry.kind = kind_of(obs);
  entry.outcome = static_cast<std::uint8_t>(outcome);
  entry.theta = obs.theta;
  entry.phi = obs.phi;
  return entry.outcome;
}

// The receiving side checks the report against its cross bits. Only
// accept-basis preparations are conclusive.
bool report_mismatches(const SessionRecord& session, Party receiver,
                       std::uint32_t index, std::uint8_t reported) {
  const auto& cross = receiver == Party::Alice ? session.alice_cross_bits
                                               : session.bob_cross_bits;
  const QubitDescriptor& c = cross[index - 1];
  return c.basis() == Basis::Accept && reported != c.state_bit;
}

bool over_budget(std::uint32_t mismatches, std::uint32_t reports_seen,
                 double eta) {
  const long long budget =
      snapped_floor(eta * static_cast<double>(reports_seen));
  return static_cast<long long>(mismatches) > budget;
}

long long count_if_matched(const std::vector<QubitDescriptor>& prep,
                           const BindingClaim& claim, Basis basis,
                           bool want_correct) {
  long long count = 0;
  for (std::size_t i = 0; i < prep.size(); ++i) {
    if (prep[i].basis() != basis) continue;
    const bool claimed_accept = claim.claimed_accept[i] != 0;
    if (claimed_accept != (basis == Basis::Accept)) continue;
    const bool correct = claim.outcomes[i] == prep[i].state_bit;
    if (correct == want_correct) ++count;
  }
  return count;
}

}  // namespace

const char* abort_reason_name(AbortReason reason) {
  switch (reason) {
    case AbortReason::None:
      return "none";
    case AbortReason::MismatchDetected:
      return "mismatch_detected";
    case AbortReason::Timeout:
      return "timeout";
    case AbortReason::TransportFailure:
      return "transport_failure";
  }
  return "none";
}

SessionRecord init_session(std::uint32_t n, Rng& rng) {
  if (n == 0) {
    throw std::invalid_argument("n: session needs at least one qubit pair");
  }
  SessionRecord s;
  s.session_id = rng.next_u64();
  s.qubit_count = n;
  s.alice_qubits = prepare_sequence(n, rng);
  s.bob_qubits = prepare_sequence(n, rng);
  s.alice_cross_bits = s.bob_qubits;
  s.bob_cross_bits = s.alice_qubits;
  s.round_deadline = n;
  return s;
}

SessionRecord make_session(std::uint64_t session_id,
                           std::vector<QubitDescriptor> alice,
                           std::vector<QubitDescriptor> bob) {
  if (alice.empty() || alice.size() != bob.size()) {
    throw std::invalid_argument(
        "session: both clients need the same nonzero qubit count");
  }
  SessionRecord s;
  s.session_id = session_id;
  s.qubit_count = static_cast<std::uint32_t>(alice.size());
  s.alice_cross_bits = bob;
  s.bob_cross_bits = alice;
  s.alice_qubits = std::move(alice);
  s.bob_qubits = std::move(bob);
  s.round_deadline = s.qubit_count;
  return s;
}

ExchangeResult run_exchange(const SessionRecord& session,
                            const Strategy& strat_alice,
                            const Strategy& strat_bob,
                            const NoiseModel& noise, Rng& rng) {
  const std::uint32_t n = session.qubit_count;
  strat_alice.validate(n);
  strat_bob.validate(n);

  ExchangeResult result;
  result.alice.entries.resize(n);
  result.bob.entries.resize(n);
  auto& transcript = result.transcript;

  for (std::uint32_t m = 1; m <= n; ++m) {
    if (m > session.round_deadline) {
      transcript.abort_step = m;
      transcript.abort_reason = AbortReason::Timeout;
      transcript.aborted_by = Party::Alice;
      return result;
    }

    // Alice measures and reports; Bob checks.
    const std::uint8_t alice_bit =
        play_round(strat_alice, m, session, Party::Alice, result.alice,
                   noise, rng);
    transcript.rounds.push_back({Party::Alice, m, alice_bit});
    if (report_mismatches(session, Party::Bob, m, alice_bit)) {
      ++result.bob.mismatches_seen;
    }
    if (over_budget(result.bob.mismatches_seen, m, noise.tolerance)) {
      transcript.abort_step = m;
      transcript.abort_reason = AbortReason::MismatchDetected;
      transcript.aborted_by = Party::Bob;
      return result;
    }

    // Bob measures and reports; Alice checks.
    const std::uint8_t bob_bit = play_round(strat_bob, m, session,
                                            Party::Bob, result.bob, noise,
                                            rng);
    transcript.rounds.push_back({Party::Bob, m, bob_bit});
    if (report_mismatches(session, Party::Alice, m, bob_bit)) {
      ++result.alice.mismatches_seen;
    }
    if (over_budget(result.alice.mismatches_seen, m, noise.tolerance)) {
      transcript.abort_step = m;
      transcript.abort_reason = AbortReason::MismatchDetected;
      transcript.aborted_by = Party::Alice;
      return result;
    }
  }
  return result;
}

BindingClaim finish_and_claim(const SessionRecord& session, Party party,
                              const PartyRecord& record,
                              Strategy::Intent intent,
                              const NoiseModel& noise, Rng& rng) {
  const auto& qubits =
      party == Party::Alice ? session.alice_qubits : session.bob_qubits;
  if (record.entries.size() != qubits.size()) {
    throw std::invalid_argument("claim: record length does not match N");
  }
  const bool bind = intent == Strategy::Intent::Bind;
  const Observable completion =
      bind ? Observable::accept() : Observable::reject();

  BindingClaim claim;
  claim.party = party;
  claim.claimed_accept.resize(qubits.size());
  claim.outcomes.resize(qubits.size());
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    const auto& e = record.entries[i];
    switch (e.kind) {
      case MeasurementKind::AcceptBasis:
        claim.claimed_accept[i] = 1;
        claim.outcomes[i] = e.outcome;
        break;
      case MeasurementKind::RejectBasis:
        claim.claimed_accept[i] = 0;
        claim.outcomes[i] = e.outcome;
        break;
      case MeasurementKind::RotatedObs:
        claim.claimed_accept[i] = bind ? 1 : 0;
        claim.outcomes[i] = e.outcome;
        break;
      case MeasurementKind::Unmeasured:
      case MeasurementKind::GuessedOnly:
        claim.claimed_accept[i] = bind ? 1 : 0;
        claim.outcomes[i] = static_cast<std::uint8_t>(
            measure(qubits[i], completion, noise, rng));
        break;
    }
  }
  return claim;
}

Verdict binding_verdict(const SessionRecord& session,
                        const BindingClaim& claim_alice,
                        const BindingClaim& claim_bob, double alpha,
                        double eta) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw std::invalid_argument("alpha: must lie in (1/2, 1)");
  }
  if (eta < 0.0 || eta >= 1.0) {
    throw std::invalid_argument("eta: must lie in [0, 1)");
  }
  const std::size_t n = session.qubit_count;
  for (const auto* claim : {&claim_alice, &claim_bob}) {
    if (claim->claimed_accept.size() != n || claim->outcomes.size() != n) {
      throw std::invalid_argument("claim: length does not match session N");
    }
  }

  struct Side {
    long long n_accept = 0, n_reject = 0;
    long long accept_correct = 0, reject_correct = 0;
    bool flagged = false;
    bool accepts = false, rejects = false;
  };

  auto evaluate = [&](const std::vector<QubitDescriptor>& prep,
                      const BindingClaim& claim) {
    Side side;
    long long matched = 0, matched_wrong = 0;
    for (std::size_t i = 0; i < prep.size(); ++i) {
      const bool prep_accept = prep[i].basis() == Basis::Accept;
      side.n_accept += prep_accept;
      side.n_reject += !prep_accept;
      if ((claim.claimed_accept[i] != 0) == prep_accept) {
        ++matched;
        if (claim.outcomes[i] != prep[i].state_bit) ++matched_wrong;
      }
    }
    // Lying check: matched-basis outcomes must track the preparation
    // record up to the noise budget.
    side.flagged =
        matched_wrong > snapped_ceil(eta * static_cast<double>(matched));
    side.accept_correct =
        count_if_matched(prep, claim, Basis::Accept, true);
    side.reject_correct =
        count_if_matched(prep, claim, Basis::Reject, true);
    side.accepts = acceptance_succeeds(side.accept_correct, alpha,
                                       side.n_accept);
    side.rejects = rejection_succeeds(side.n_reject - side.reject_correct,
                                      alpha, side.n_reject);
    return side;
  };

  const Side a = evaluate(session.alice_qubits, claim_alice);
  const Side b = evaluate(session.bob_qubits, claim_bob);

  Verdict v;
  v.alpha_used = alpha;
  v.accept_correct_alice = static_cast<std::uint32_t>(a.accept_correct);
  v.reject_correct_alice = static_cast<std::uint32_t>(a.reject_correct);
  v.accept_correct_bob = static_cast<std::uint32_t>(b.accept_correct);
  v.reject_correct_bob = static_cast<std::uint32_t>(b.reject_correct);
  v.alice_accepts = a.accepts;
  v.alice_rejects = a.rejects;
  v.bob_accepts = b.accepts;
  v.bob_rejects = b.rejects;

  if (a.flagged && b.flagged) {
    v.cheater = CheaterFlag::Both;
    v.contract_valid = false;
  } else if (a.flagged) {
    v.cheater = CheaterFlag::Alice;
    v.contract_valid = b.accepts;
  } else if (b.flagged) {
    v.cheater = CheaterFlag::Bob;
    v.contract_valid = a.accepts;
  } else {
    v.contract_valid = (a.accepts && !b.rejects) || (b.accepts && !a.rejects);
  }
  return v;
}

double sample_alpha(const AlphaDistribution& dist, Rng& rng) {
  return dist.sample(rng);
}

}  // namespace qcs
