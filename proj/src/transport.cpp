#include "qcs/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

#include "qcs/thresholds.hpp"

namespace qcs::transport {

namespace {

class MemoryChannel;

struct MemoryPipe {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::uint8_t> bytes;
  bool closed = false;
};

class MemoryChannel : public ByteChannel {
 public:
  MemoryChannel(std::shared_ptr<MemoryPipe> in, std::shared_ptr<MemoryPipe> out)
      : in_(std::move(in)), out_(std::move(out)) {}

  ~MemoryChannel() override { close(); }

  bool send(std::span<const std::uint8_t> bytes) override {
    std::lock_guard<std::mutex> lock(out_->mutex);
    if (out_->closed) return false;
    out_->bytes.insert(out_->bytes.end(), bytes.begin(), bytes.end());
    out_->ready.notify_all();
    return true;
  }

  IoStatus recv_exact(std::uint8_t* out, std::size_t n,
                      int timeout_ms) override {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(timeout_ms);
    std::unique_lock<std::mutex> lock(in_->mutex);
    while (in_->bytes.size() < n) {
      if (in_->closed) return IoStatus::Closed;
      if (in_->ready.wait_until(lock, deadline) == std::cv_status::timeout &&
          in_->bytes.size() < n) {
        return IoStatus::Timeout;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = in_->bytes.front();
      in_->bytes.pop_front();
    }
    return IoStatus::Ok;
  }

  void close() override {
    for (auto& pipe : {in_, out_}) {
      std::lock_guard<std::mutex> lock(pipe->mutex);
      pipe->closed = true;
      pipe->ready.notify_all();
    }
  }

 private:
  std::shared_ptr<MemoryPipe> in_;
  std::shared_ptr<MemoryPipe> out_;
};

}  // namespace

std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>>
make_memory_duplex() {
  auto a_to_b = std::make_shared<MemoryPipe>();
  auto b_to_a = std::make_shared<MemoryPipe>();
  return {std::make_unique<MemoryChannel>(b_to_a, a_to_b),
          std::make_unique<MemoryChannel>(a_to_b, b_to_a)};
}

std::unique_ptr<TcpChannel> TcpChannel::connect(const std::string& host,
                                                std::uint16_t port,
                                                int timeout_ms) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return nullptr;
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    return nullptr;
  }
  // Blocking connect is fine for loopback use; timeout_ms guards reads.
  (void)timeout_ms;
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    return nullptr;
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return std::unique_ptr<TcpChannel>(new TcpChannel(fd));
}

std::unique_ptr<TcpChannel> TcpChannel::from_fd(int fd) {
  return std::unique_ptr<TcpChannel>(new TcpChannel(fd));
}

TcpChannel::~TcpChannel() { close(); }

bool TcpChannel::send(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent,
                             MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

IoStatus TcpChannel::recv_exact(std::uint8_t* out, std::size_t n,
                                int timeout_ms) {
  std::size_t got = 0;
  while (got < n) {
    pollfd pfd{fd_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, timeout_ms);
    if (pr == 0) return IoStatus::Timeout;
    if (pr < 0) return IoStatus::Error;
    const ssize_t r = ::recv(fd_, out + got, n - got, 0);
    if (r == 0) return IoStatus::Closed;
    if (r < 0) return IoStatus::Error;
    got += static_cast<std::size_t>(r);
  }
  return IoStatus::Ok;
}

void TcpChannel::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

bool send_message(ByteChannel& channel, const wire::WireMessage& msg) {
  return channel.send(wire::encode_message(msg));
}

RecvResult recv_message(ByteChannel& channel, int timeout_ms) {
  std::uint8_t prefix[4];
  IoStatus status = channel.recv_exact(prefix, 4, timeout_ms);
  if (status != IoStatus::Ok) return {status, std::nullopt};

  std::size_t len;
  try {
    len = wire::decode_frame_length(prefix);
  } catch (const wire::DecodeError&) {
    return {IoStatus::Error, std::nullopt};
  }
  std::vector<std::uint8_t> frame(4 + len);
  std::memcpy(frame.data(), prefix, 4);
  status = channel.recv_exact(frame.data() + 4, len, timeout_ms);
  if (status != IoStatus::Ok) return {status, std::nullopt};
  try {
    return {IoStatus::Ok, wire::decode_message(frame)};
  } catch (const wire::DecodeError&) {
    return {IoStatus::Error, std::nullopt};
  }
}

namespace {

AbortReason reason_from_status(IoStatus status) {
  return status == IoStatus::Timeout ? AbortReason::Timeout
                                     : AbortReason::TransportFailure;
}

}  // namespace

ClientExchangeOutcome client_exchange(const ClientContext& ctx,
                                      ByteChannel& peer, Rng& rng) {
  const auto n = static_cast<std::uint32_t>(ctx.own_qubits.size());
  ctx.strategy.validate(n);

  ClientExchangeOutcome outcome;
  outcome.self.entries.resize(n);

  const bool first = ctx.me == Party::Alice;
  std::uint32_t mismatches = 0;

  auto do_send = [&](std::uint32_t m) -> bool {
    auto& entry = outcome.self.entries[m - 1];
    if (ctx.strategy.kind == Strategy::Kind::Guesser) {
      entry.kind = MeasurementKind::GuessedOnly;
      entry.outcome = static_cast<std::uint8_t>(rng.next_below(2));
    } else {
      Observable obs = Observable::accept();
      switch (ctx.strategy.kind) {
        case Strategy::Kind::Honest:
          break;
        case Strategy::Kind::AlwaysReject:
          obs = Observable::reject();
          break;
        case Strategy::Kind::MixedReject:
          if (ctx.strategy.uses_round(m)) obs = Observable::reject();
          break;
        case Strategy::Kind::Rotated:
          if (ctx.strategy.uses_round(m)) {
            obs = Observable::rotated(ctx.strategy.theta, ctx.strategy.phi);
          }
          break;
        case Strategy::Kind::Guesser:
          break;
      }
      entry.outcome = static_cast<std::uint8_t>(
          measure(ctx.own_qubits[m - 1], obs, ctx.noise, rng));
      entry.kind = obs.kind == Observable::Kind::Accept
                       ? MeasurementKind::AcceptBasis
                   : obs.kind == Observable::Kind::Reject
                       ? MeasurementKind::RejectBasis
                       : MeasurementKind::RotatedObs;
      entry.theta = obs.theta;
      entry.phi = obs.phi;
    }
    outcome.transcript.rounds.push_back({ctx.me, m, entry.outcome});
    wire::WireMessage msg;
    msg.session_id = ctx.session_id;
    msg.payload = wire::OutcomeReport{m, entry.outcome};
    if (!send_message(peer, msg)) {
      outcome.transcript.abort_step = m;
      outcome.transcript.abort_reason = AbortReason::TransportFailure;
      outcome.transcript.aborted_by = ctx.me;
      return false;
    }
    return true;
  };

  auto do_recv = [&](std::uint32_t m) -> bool {
    const RecvResult got = recv_message(peer, ctx.round_timeout_ms);
    const auto* report =
        got.message ? std::get_if<wire::OutcomeReport>(&got.message->payload)
                    : nullptr;
    if (got.status != IoStatus::Ok || report == nullptr ||
        got.message->session_id != ctx.session_id || report->index != m) {
      outcome.transcript.abort_step = m;
      outcome.transcript.abort_reason =
          got.status == IoStatus::Ok ? AbortReason::TransportFailure
                                     : reason_from_status(got.status);
      outcome.transcript.aborted_by = ctx.me;
      return false;
    }
    outcome.transcript.rounds.push_back({other(ctx.me), m, report->outcome});
    const QubitDescriptor& c = ctx.cross_bits[m - 1];
    if (c.basis() == Basis::Accept && report->outcome != c.state_bit) {
      ++mismatches;
    }
    const long long budget =
        snapped_floor(ctx.noise.tolerance * static_cast<double>(m));
    if (static_cast<long long>(mismatches) > budget) {
      outcome.self.mismatches_seen = mismatches;
      outcome.transcript.abort_step = m;
      outcome.transcript.abort_reason = AbortReason::MismatchDetected;
      outcome.transcript.aborted_by = ctx.me;
      return false;
    }
    return true;
  };

  for (std::uint32_t m = 1; m <= n; ++m) {
    if (first) {
      if (!do_send(m) || !do_recv(m)) break;
    } else {
      if (!do_recv(m) || !do_send(m)) break;
    }
  }
  outcome.self.mismatches_seen = mismatches;
  return outcome;
}

std::optional<Verdict> client_bind(const ClientContext& ctx,
                                   const PartyRecord& record,
                                   Strategy::Intent intent,
                                   ByteChannel& trent, Rng& rng,
                                   int timeout_ms) {
  SessionRecord view;  // enough of the session for claim assembly
  view.session_id = ctx.session_id;
  view.qubit_count = static_cast<std::uint32_t>(ctx.own_qubits.size());
  if (ctx.me == Party::Alice) {
    view.alice_qubits = ctx.own_qubits;
    view.bob_qubits.resize(view.qubit_count);
  } else {
    view.bob_qubits = ctx.own_qubits;
    view.alice_qubits.resize(view.qubit_count);
  }
  BindingClaim claim =
      finish_and_claim(view, ctx.me, record, intent, ctx.noise, rng);

  wire::WireMessage request;
  request.session_id = ctx.session_id;
  request.payload = wire::BindRequest{ctx.me};
  if (!send_message(trent, request)) return std::nullopt;

  wire::WireMessage claim_msg;
  claim_msg.session_id = ctx.session_id;
  claim_msg.payload = wire::BindClaimMsg{std::move(claim)};
  if (!send_message(trent, claim_msg)) return std::nullopt;

  const RecvResult got = recv_message(trent, timeout_ms);
  if (got.status != IoStatus::Ok || !got.message) return std::nullopt;
  const auto* notice = std::get_if<wire::VerdictNotice>(&got.message->payload);
  if (notice == nullptr) return std::nullopt;
  return notice->verdict;
}

struct TrentServer::PendingSession {
  SessionRecord record;
  std::optional<BindingClaim> claims[2];
  std::optional<Verdict> verdict;
};

TrentServer::TrentServer(std::uint16_t port, TrentConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("trent: socket() failed");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) !=
      0) {
    ::close(listen_fd_);
    throw std::runtime_error("trent: bind() failed");
  }
  if (::listen(listen_fd_, 16) != 0) {
    ::close(listen_fd_);
    throw std::runtime_error("trent: listen() failed");
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TrentServer::~TrentServer() { stop(); }

void TrentServer::stop() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (stopping_) return;
    stopping_ = true;
  }
  claims_ready_.notify_all();
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (acceptor_.joinable()) acceptor_.join();
  for (auto& worker : workers_) {
    if (worker.joinable()) worker.join();
  }
}

SessionRecord TrentServer::create_session(std::uint32_t n) {
  std::lock_guard<std::mutex> lock(mutex_);
  Rng session_rng = rng_.substream(session_counter_++);
  SessionRecord record = init_session(n, session_rng);
  auto pending = std::make_shared<PendingSession>();
  pending->record = record;
  sessions_[record.session_id] = std::move(pending);
  if (!config_.session_dir.empty()) {
    wire::write_file(config_.session_dir + "/session_" +
                         std::to_string(record.session_id) + ".bin",
                     wire::encode_session(record));
  }
  return record;
}

Verdict TrentServer::adjudicate(const SessionRecord& session,
                                const BindingClaim& claim_alice,
                                const BindingClaim& claim_bob, double alpha) {
  return binding_verdict(session, claim_alice, claim_bob, alpha,
                         config_.eta);
}

void TrentServer::accept_loop() {
  while (true) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;  // listener closed
    std::lock_guard<std::mutex> lock(mutex_);
    if (stopping_) {
      ::close(fd);
      return;
    }
    workers_.emplace_back(
        [this, fd] { serve_connection(TcpChannel::from_fd(fd)); });
  }
}

void TrentServer::serve_connection(std::unique_ptr<ByteChannel> channel) {
  while (true) {
    const RecvResult got = recv_message(*channel, config_.bind_wait_ms);
    if (got.status != IoStatus::Ok || !got.message) return;
    if (std::holds_alternative<wire::InitRequest>(got.message->payload)) {
      handle_init(*channel, *got.message);
    } else if (std::holds_alternative<wire::BindRequest>(
                   got.message->payload)) {
      handle_bind(*channel, *got.message);
    } else {
      return;  // protocol error; drop the connection
    }
  }
}

void TrentServer::handle_init(ByteChannel& channel,
                              const wire::WireMessage& msg) {
  const auto& request = std::get<wire::InitRequest>(msg.payload);
  const SessionRecord record = create_session(request.n);
  for (Party party : {Party::Alice, Party::Bob}) {
    wire::WireMessage grant;
    grant.session_id = record.session_id;
    grant.payload = wire::InitGrant{
        party,
        party == Party::Alice ? record.alice_qubits : record.bob_qubits,
        party == Party::Alice ? record.alice_cross_bits
                              : record.bob_cross_bits};
    if (!send_message(channel, grant)) return;
  }
}

void TrentServer::handle_bind(ByteChannel& channel,
                              const wire::WireMessage& msg) {
  const auto& request = std::get<wire::BindRequest>(msg.payload);

  const RecvResult got = recv_message(channel, config_.bind_wait_ms);
  if (got.status != IoStatus::Ok || !got.message ||
      got.message->session_id != msg.session_id) {
    return;
  }
  const auto* claim_msg =
      std::get_if<wire::BindClaimMsg>(&got.message->payload);
  if (claim_msg == nullptr || claim_msg->claim.party != request.party) {
    return;
  }

  std::shared_ptr<PendingSession> session;
  {
    std::unique_lock<std::mutex> lock(mutex_);
    const auto it = sessions_.find(msg.session_id);
    if (it == sessions_.end()) return;
    session = it->second;
    session->claims[static_cast<int>(request.party)] = claim_msg->claim;

    if (session->claims[0] && session->claims[1] && !session->verdict) {
      // Both parties present: draw alpha and settle the contract.
      Rng alpha_rng = rng_.substream(0x616c7068'61000000ull ^
                                     session->record.session_id);
      const double alpha = sample_alpha(config_.alpha, alpha_rng);
      session->verdict =
          binding_verdict(session->record, *session->claims[0],
                          *session->claims[1], alpha, config_.eta);
      claims_ready_.notify_all();
    }
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(config_.bind_wait_ms);
    while (!session->verdict && !stopping_) {
      if (claims_ready_.wait_until(lock, deadline) ==
          std::cv_status::timeout) {
        break;
      }
    }
    if (!session->verdict) return;
  }

  wire::WireMessage notice;
  notice.session_id = msg.session_id;
  notice.payload = wire::VerdictNotice{*session->verdict};
  send_message(channel, notice);
}

}  // namespace qcs::transport
