#include "qcs/wire.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace qcs::wire {

namespace {

enum : std::uint8_t {
  kTagInitRequest = 1,
  kTagInitGrant = 2,
  kTagOutcomeReport = 3,
  kTagBindRequest = 4,
  kTagBindClaim = 5,
  kTagVerdictNotice = 6,
};

constexpr std::uint8_t kSessionMagic[4] = {'Q', 'C', 'S', 'S'};
constexpr std::uint8_t kSessionVersion = 1;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) {
      bytes_.push_back(static_cast<std::uint8_t>(v >> s));
    }
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) {
      bytes_.push_back(static_cast<std::uint8_t>(v >> s));
    }
  }
  void f64(double v) {
    std::uint64_t raw;
    std::memcpy(&raw, &v, sizeof(raw));
    u64(raw);
  }
  void raw(std::span<const std::uint8_t> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
  }
  void bits(std::span<const std::uint8_t> values) {
    std::uint8_t acc = 0;
    int used = 0;
    for (std::uint8_t v : values) {
      acc = static_cast<std::uint8_t>((acc << 1) | (v & 1));
      if (++used == 8) {
        bytes_.push_back(acc);
        acc = 0;
        used = 0;
      }
    }
    if (used > 0) bytes_.push_back(static_cast<std::uint8_t>(acc << (8 - used)));
  }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  double f64() {
    const std::uint64_t raw = u64();
    double v;
    std::memcpy(&v, &raw, sizeof(v));
    return v;
  }
  std::vector<std::uint8_t> raw(std::size_t count) {
    need(count);
    std::vector<std::uint8_t> out(bytes_.begin() + pos_,
                                  bytes_.begin() + pos_ + count);
    pos_ += count;
    return out;
  }
  std::vector<std::uint8_t> bits(std::size_t count) {
    const std::size_t nbytes = (count + 7) / 8;
    need(nbytes);
    std::vector<std::uint8_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = (bytes_[pos_ + i / 8] >> (7 - i % 8)) & 1;
    }
    // Canonical encoding keeps padding bits zero.
    if (count % 8 != 0) {
      const std::uint8_t pad_mask =
          static_cast<std::uint8_t>(0xff >> (count % 8));
      if ((bytes_[pos_ + nbytes - 1] & pad_mask) != 0) {
        throw MalformedPayloadError("nonzero padding in bit array");
      }
    }
    pos_ += nbytes;
    return out;
  }
  void expect_done() const {
    if (pos_ != bytes_.size()) {
      throw MalformedPayloadError("trailing bytes after payload");
    }
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t count) const {
    if (remaining() < count) {
      throw MalformedPayloadError("payload shorter than declared fields");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_descriptors(Writer& w,
                       const std::vector<QubitDescriptor>& qubits) {
  std::vector<std::uint8_t> basis(qubits.size()), state(qubits.size());
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    basis[i] = qubits[i].basis_bit;
    state[i] = qubits[i].state_bit;
  }
  w.bits(basis);
  w.bits(state);
}

std::vector<QubitDescriptor> read_descriptors(Reader& r, std::size_t n) {
  const auto basis = r.bits(n);
  const auto state = r.bits(n);
  std::vector<QubitDescriptor> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {basis[i], state[i]};
  }
  return out;
}

Party read_party(Reader& r) {
  const std::uint8_t v = r.u8();
  if (v > 1) throw MalformedPayloadError("invalid party tag");
  return static_cast<Party>(v);
}

std::uint32_t checked_n(std::uint64_t n) {
  if (n == 0 || n > (1u << 25)) {
    throw MalformedPayloadError("qubit count out of range");
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace

const char* message_type_name(const WireMessage& msg) {
  struct Namer {
    const char* operator()(const InitRequest&) const { return "InitRequest"; }
    const char* operator()(const InitGrant&) const { return "InitGrant"; }
    const char* operator()(const OutcomeReport&) const {
      return "OutcomeReport";
    }
    const char* operator()(const BindRequest&) const { return "BindRequest"; }
    const char* operator()(const BindClaimMsg&) const { return "BindClaim"; }
    const char* operator()(const VerdictNotice&) const {
      return "VerdictNotice";
    }
  };
  return std::visit(Namer{}, msg.payload);
}

std::vector<std::uint8_t> encode_message(const WireMessage& msg) {
  Writer payload;
  payload.u8(static_cast<std::uint8_t>(msg.payload.index() + 1));
  payload.u64(msg.session_id);

  if (const auto* m = std::get_if<InitRequest>(&msg.payload)) {
    payload.u32(m->n);
    payload.u32(static_cast<std::uint32_t>(m->contract.size()));
    payload.raw(m->contract);
  } else if (const auto* m = std::get_if<InitGrant>(&msg.payload)) {
    if (m->own_qubits.size() != m->cross_bits.size()) {
      throw std::invalid_argument("grant arrays must have equal length");
    }
    payload.u8(static_cast<std::uint8_t>(m->party));
    payload.u32(static_cast<std::uint32_t>(m->own_qubits.size()));
    write_descriptors(payload, m->own_qubits);
    write_descriptors(payload, m->cross_bits);
  } else if (const auto* m = std::get_if<OutcomeReport>(&msg.payload)) {
    payload.u32(m->index);
    payload.u8(m->outcome & 1);
  } else if (const auto* m = std::get_if<BindRequest>(&msg.payload)) {
    payload.u8(static_cast<std::uint8_t>(m->party));
  } else if (const auto* m = std::get_if<BindClaimMsg>(&msg.payload)) {
    if (m->claim.claimed_accept.size() != m->claim.outcomes.size()) {
      throw std::invalid_argument("claim arrays must have equal length");
    }
    payload.u8(static_cast<std::uint8_t>(m->claim.party));
    payload.u32(static_cast<std::uint32_t>(m->claim.claimed_accept.size()));
    payload.bits(m->claim.claimed_accept);
    payload.bits(m->claim.outcomes);
  } else if (const auto* m = std::get_if<VerdictNotice>(&msg.payload)) {
    const Verdict& v = m->verdict;
    payload.u8(v.contract_valid ? 1 : 0);
    payload.u8(static_cast<std::uint8_t>(v.cheater));
    payload.f64(v.alpha_used);
    payload.u32(v.accept_correct_alice);
    payload.u32(v.reject_correct_alice);
    payload.u32(v.accept_correct_bob);
    payload.u32(v.reject_correct_bob);
    payload.u8(static_cast<std::uint8_t>(
        (v.alice_accepts << 0) | (v.alice_rejects << 1) |
        (v.bob_accepts << 2) | (v.bob_rejects << 3)));
  }

  std::vector<std::uint8_t> body = payload.take();
  if (body.size() > kMaxFrameBytes) {
    throw std::length_error("frame exceeds the 16 MiB cap");
  }
  Writer frame;
  frame.u32(static_cast<std::uint32_t>(body.size()));
  frame.raw(body);
  return frame.take();
}

std::size_t decode_frame_length(std::span<const std::uint8_t> prefix) {
  if (prefix.size() < 4) {
    throw TruncatedFrameError("frame shorter than its length prefix");
  }
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = (len << 8) | prefix[i];
  if (len > kMaxFrameBytes) {
    throw OversizeFrameError("declared frame length exceeds the 16 MiB cap");
  }
  return len;
}

WireMessage decode_message(std::span<const std::uint8_t> bytes) {
  const std::size_t len = decode_frame_length(bytes);
  if (bytes.size() < 4 + len) {
    throw TruncatedFrameError("frame body shorter than declared length");
  }
  if (bytes.size() > 4 + len) {
    throw MalformedPayloadError("bytes continue past the framed message");
  }
  Reader r(bytes.subspan(4, len));

  const std::uint8_t tag = r.u8();
  WireMessage msg;
  msg.session_id = r.u64();
  switch (tag) {
    case kTagInitRequest: {
      InitRequest m;
      m.n = checked_n(r.u32());
      const std::uint32_t contract_len = r.u32();
      if (contract_len > r.remaining()) {
        throw MalformedPayloadError("contract length overruns payload");
      }
      m.contract = r.raw(contract_len);
      msg.payload = std::move(m);
      break;
    }
    case kTagInitGrant: {
      InitGrant m;
      m.party = read_party(r);
      const std::uint32_t n = checked_n(r.u32());
      m.own_qubits = read_descriptors(r, n);
      m.cross_bits = read_descriptors(r, n);
      msg.payload = std::move(m);
      break;
    }
    case kTagOutcomeReport: {
      OutcomeReport m;
      m.index = r.u32();
      m.outcome = r.u8();
      if (m.outcome > 1) throw MalformedPayloadError("outcome must be a bit");
      msg.payload = m;
      break;
    }
    case kTagBindRequest: {
      BindRequest m;
      m.party = read_party(r);
      msg.payload = m;
      break;
    }
    case kTagBindClaim: {
      BindClaimMsg m;
      m.claim.party = read_party(r);
      const std::uint32_t n = checked_n(r.u32());
      m.claim.claimed_accept = r.bits(n);
      m.claim.outcomes = r.bits(n);
      msg.payload = std::move(m);
      break;
    }
    case kTagVerdictNotice: {
      VerdictNotice m;
      Verdict& v = m.verdict;
      v.contract_valid = r.u8() != 0;
      const std::uint8_t cheater = r.u8();
      if (cheater > 3) throw MalformedPayloadError("invalid cheater flag");
      v.cheater = static_cast<CheaterFlag>(cheater);
      v.alpha_used = r.f64();
      v.accept_correct_alice = r.u32();
      v.reject_correct_alice = r.u32();
      v.accept_correct_bob = r.u32();
      v.reject_correct_bob = r.u32();
      const std::uint8_t flags = r.u8();
      if (flags > 0x0f) throw MalformedPayloadError("invalid verdict flags");
      v.alice_accepts = flags & 1;
      v.alice_rejects = flags & 2;
      v.bob_accepts = flags & 4;
      v.bob_rejects = flags & 8;
      msg.payload = std::move(m);
      break;
    }
    default:
      throw MalformedPayloadError("unknown message type tag");
  }
  r.expect_done();
  return msg;
}

std::vector<std::uint8_t> encode_session(const SessionRecord& session) {
  Writer w;
  w.raw(kSessionMagic);
  w.u8(kSessionVersion);
  w.u64(session.session_id);
  w.u32(session.qubit_count);
  write_descriptors(w, session.alice_qubits);
  write_descriptors(w, session.bob_qubits);
  write_descriptors(w, session.alice_cross_bits);
  write_descriptors(w, session.bob_cross_bits);
  w.u64(session.round_deadline);
  return w.take();
}

SessionRecord decode_session(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.raw(4);
  if (std::memcmp(magic.data(), kSessionMagic, 4) != 0) {
    throw MalformedPayloadError("not a session record");
  }
  if (r.u8() != kSessionVersion) {
    throw MalformedPayloadError("unsupported session record version");
  }
  SessionRecord s;
  s.session_id = r.u64();
  s.qubit_count = checked_n(r.u32());
  s.alice_qubits = read_descriptors(r, s.qubit_count);
  s.bob_qubits = read_descriptors(r, s.qubit_count);
  s.alice_cross_bits = read_descriptors(r, s.qubit_count);
  s.bob_cross_bits = read_descriptors(r, s.qubit_count);
  s.round_deadline = r.u64();
  r.expect_done();
  return s;
}

void write_file(const std::string& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace qcs::wire
