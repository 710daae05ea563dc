#ifndef KSRT_WIRE_HPP
#define KSRT_WIRE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ksrt/bitstring.hpp"
#include "ksrt/extraction.hpp"

namespace ksrt::wire {

using SessionId = std::array<uint8_t, 16>;

// ---------------------------------------------------------------------
// Rally datagram: fixed 26 bytes, all multi-byte integers big-endian.
//
//   magic "KSRT" | version 0x01 | kind | session id (16) | seq (4)
//
// Carries no payload and in particular no timestamps: each endpoint can
// determine only its own round-trip time.
// ---------------------------------------------------------------------

inline constexpr std::array<uint8_t, 4> kMagic{0x4b, 0x53, 0x52, 0x54};
inline constexpr uint8_t kVersion = 0x01;
inline constexpr size_t kRallyPacketSize = 26;

enum class PacketKind : uint8_t { probe = 0x01, echo = 0x02 };

struct RallyPacket {
    PacketKind kind = PacketKind::probe;
    SessionId session_id{};
    uint32_t seq = 0;

    bool operator==(const RallyPacket&) const = default;
};

std::array<uint8_t, kRallyPacketSize> encode(const RallyPacket& p);

// Unknown magic, version, or kind, and short/long datagrams all decode
// to nullopt and are ignored silently by the rally loop.
std::optional<RallyPacket> decode_rally(std::span<const uint8_t> datagram);

// ---------------------------------------------------------------------
// Reconciliation stream framing: type (1) | length (4, BE) | payload.
// ---------------------------------------------------------------------

enum class FrameType : uint8_t {
    discard_set = 0x10,
    parity_vector = 0x11,
    plan_commit = 0x12,
    key_digest = 0x13,
};

struct Frame {
    FrameType type = FrameType::discard_set;
    std::vector<uint8_t> payload;

    bool operator==(const Frame&) const = default;
};

inline constexpr size_t kFrameHeaderSize = 5;

std::vector<uint8_t> encode(const Frame& f);

// Decodes one complete frame from the head of `buffer`; returns nullopt
// if more bytes are needed. Throws on unknown frame type.
std::optional<Frame> decode_frame(std::span<const uint8_t> buffer, size_t& consumed);

// DISCARD_SET payload: count (4, BE) then that many sorted 4-byte indices.
Frame make_discard_set(const DiscardSet& set);
DiscardSet parse_discard_set(const Frame& f);

// PARITY_VECTOR payload: iteration (1) | bit count (4, BE) | packed bits.
struct ParityVector {
    uint8_t iteration = 0;
    BitString bits;

    bool operator==(const ParityVector&) const = default;
};
Frame make_parity_vector(const ParityVector& pv);
ParityVector parse_parity_vector(const Frame& f);

// PLAN_COMMIT payload: total iterations (4, BE) | PA block size (4, BE).
struct PlanCommit {
    uint32_t total_iterations = 0;
    uint32_t pa_block_size = 0;

    bool operator==(const PlanCommit&) const = default;
};
Frame make_plan_commit(const PlanCommit& pc);
PlanCommit parse_plan_commit(const Frame& f);

// KEY_DIGEST payload: exactly 32 digest bytes.
Frame make_key_digest(const std::array<uint8_t, 32>& digest);
std::array<uint8_t, 32> parse_key_digest(const Frame& f);

} // namespace ksrt::wire

#endif
