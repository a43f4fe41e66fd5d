#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qcs/protocol.hpp"

namespace qcs::wire {

// Canonical frame: 4-byte big-endian payload length, then the payload.
// Payload layout: [type tag u8][session_id u64 BE][fields]. Integers are
// big-endian; bit arrays pack 8 per byte, most significant bit first,
// with zero padding. Frames above 16 MiB are rejected.

inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class TruncatedFrameError : public DecodeError {
 public:
  using DecodeError::DecodeError;
};
class OversizeFrameError : public DecodeError {
 public:
  using DecodeError::DecodeError;
};
class MalformedPayloadError : public DecodeError {
 public:
  using DecodeError::DecodeError;
};

struct InitRequest {
  std::uint32_t n = 0;
  std::vector<std::uint8_t> contract;  // opaque signed-message bytes

  friend bool operator==(const InitRequest&, const InitRequest&) = default;
};

struct InitGrant {
  Party party = Party::Alice;
  std::vector<QubitDescriptor> own_qubits;
  std::vector<QubitDescriptor> cross_bits;

  friend bool operator==(const InitGrant&, const InitGrant&) = default;
};

struct OutcomeReport {
  std::uint32_t index = 0;  // 1-based round
  std::uint8_t outcome = 0;

  friend bool operator==(const OutcomeReport&, const OutcomeReport&) = default;
};

struct BindRequest {
  Party party = Party::Alice;

  friend bool operator==(const BindRequest&, const BindRequest&) = default;
};

struct BindClaimMsg {
  BindingClaim claim;

  friend bool operator==(const BindClaimMsg&, const BindClaimMsg&) = default;
};

struct VerdictNotice {
  Verdict verdict;

  friend bool operator==(const VerdictNotice&, const VerdictNotice&) = default;
};

struct WireMessage {
  std::uint64_t session_id = 0;
  std::variant<InitRequest, InitGrant, OutcomeReport, BindRequest,
               BindClaimMsg, VerdictNotice>
      payload;

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

const char* message_type_name(const WireMessage& msg);

// Whole frame, length prefix included.
std::vector<std::uint8_t> encode_message(const WireMessage& msg);

// Decodes exactly one frame; trailing bytes are malformed input.
WireMessage decode_message(std::span<const std::uint8_t> bytes);

// Frame length declared by a 4-byte prefix, validated against the cap.
std::size_t decode_frame_length(std::span<const std::uint8_t> prefix);

// Session persistence uses the same canonical byte conventions.
std::vector<std::uint8_t> encode_session(const SessionRecord& session);
SessionRecord decode_session(std::span<const std::uint8_t> bytes);

void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::string& path);

}  // namespace qcs::wire
