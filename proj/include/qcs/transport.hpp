#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qcs/alpha_distribution.hpp"
#include "qcs/protocol.hpp"
#include "qcs/wire.hpp"

namespace qcs::transport {

enum class IoStatus { Ok, Closed, Timeout, Error };

// Ordered byte stream; the wire framing sits on top of this, so the
// protocol runs identically over sockets and in-memory pipes.
class ByteChannel {
 public:
  virtual ~ByteChannel() = default;
  virtual bool send(std::span<const std::uint8_t> bytes) = 0;
  virtual IoStatus recv_exact(std::uint8_t* out, std::size_t n,
                              int timeout_ms) = 0;
  virtual void close() = 0;
};

// Pair of connected in-memory endpoints.
std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>>
make_memory_duplex();

// Loopback/remote TCP endpoint.
class TcpChannel : public ByteChannel {
 public:
  static std::unique_ptr<TcpChannel> connect(const std::string& host,
                                             std::uint16_t port,
                                             int timeout_ms = 5000);
  static std::unique_ptr<TcpChannel> from_fd(int fd);
  ~TcpChannel() override;

  bool send(std::span<const std::uint8_t> bytes) override;
  IoStatus recv_exact(std::uint8_t* out, std::size_t n,
                      int timeout_ms) override;
  void close() override;

 private:
  explicit TcpChannel(int fd) : fd_(fd) {}
  int fd_ = -1;
};

bool send_message(ByteChannel& channel, const wire::WireMessage& msg);

struct RecvResult {
  IoStatus status = IoStatus::Error;
  std::optional<wire::WireMessage> message;
};
RecvResult recv_message(ByteChannel& channel, int timeout_ms);

// One client's view of a session, as handed out by an InitGrant.
struct ClientContext {
  Party me = Party::Alice;
  std::uint64_t session_id = 0;
  std::vector<QubitDescriptor> own_qubits;
  std::vector<QubitDescriptor> cross_bits;
  Strategy strategy;
  NoiseModel noise;
  int round_timeout_ms = 5000;
};

struct ClientExchangeOutcome {
  ExchangeTranscript transcript;
  PartyRecord self;
};

// Runs the exchange against the peer over a byte channel. Alice reports
// first at every index. Mismatches over the running eta budget, peer
// silence past the round timeout, and channel failures abort with the
// matching reason.
ClientExchangeOutcome client_exchange(const ClientContext& ctx,
                                      ByteChannel& peer, Rng& rng);

// Completes the remaining measurements per intent, submits the claim to
// Trent, and waits for the verdict.
std::optional<Verdict> client_bind(const ClientContext& ctx,
                                   const PartyRecord& record,
                                   Strategy::Intent intent,
                                   ByteChannel& trent, Rng& rng,
                                   int timeout_ms = 30000);

struct TrentConfig {
  std::uint64_t seed = 1;
  AlphaDistribution alpha = AlphaDistribution::uniform(0.9, 0.99);
  double eta = 0.0;
  std::string session_dir;  // persists sessions when nonempty
  int bind_wait_ms = 30000;
};

// Trusted-party endpoint: serves InitRequest (session creation, grants
// for both clients on the requesting connection) and BindRequest
// followed by BindClaim (verdict once both parties' claims arrive).
class TrentServer {
 public:
  TrentServer(std::uint16_t port, TrentConfig config);
  ~TrentServer();

  std::uint16_t bound_port() const { return port_; }
  void stop();

  // Direct-call variants used by the offline binding path and tests.
  SessionRecord create_session(std::uint32_t n);
  Verdict adjudicate(const SessionRecord& session,
                     const BindingClaim& claim_alice,
                     const BindingClaim& claim_bob, double alpha);

 private:
  struct PendingSession;

  void accept_loop();
  void serve_connection(std::unique_ptr<ByteChannel> channel);
  void handle_init(ByteChannel& channel, const wire::WireMessage& msg);
  void handle_bind(ByteChannel& channel, const wire::WireMessage& msg);

  TrentConfig config_;
  Rng rng_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::uint64_t session_counter_ = 0;

  std::mutex mutex_;
  std::condition_variable claims_ready_;
  std::map<std::uint64_t, std::shared_ptr<PendingSession>> sessions_;
  std::vector<std::thread> workers_;
  std::thread acceptor_;
  bool stopping_ = false;
};

}  // namespace qcs::transport
