#include "ksrt/wire.hpp"

#include <cstring>
#include <stdexcept>

namespace ksrt::wire {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

uint32_t get_u32(std::span<const uint8_t> in, size_t at) {
    return (static_cast<uint32_t>(in[at]) << 24) |
           (static_cast<uint32_t>(in[at + 1]) << 16) |
           (static_cast<uint32_t>(in[at + 2]) << 8) |
           static_cast<uint32_t>(in[at + 3]);
}

[[noreturn]] void malformed(const char* what) {
    throw std::invalid_argument(std::string("malformed frame payload: ") + what);
}

} // namespace

std::array<uint8_t, kRallyPacketSize> encode(const RallyPacket& p) {
    std::array<uint8_t, kRallyPacketSize> out{};
    std::memcpy(out.data(), kMagic.data(), 4);
    out[4] = kVersion;
    out[5] = static_cast<uint8_t>(p.kind);
    std::memcpy(out.data() + 6, p.session_id.data(), 16);
    out[22] = static_cast<uint8_t>(p.seq >> 24);
    out[23] = static_cast<uint8_t>(p.seq >> 16);
    out[24] = static_cast<uint8_t>(p.seq >> 8);
    out[25] = static_cast<uint8_t>(p.seq);
    return out;
}

std::optional<RallyPacket> decode_rally(std::span<const uint8_t> datagram) {
    if (datagram.size() != kRallyPacketSize) return std::nullopt;
    if (std::memcmp(datagram.data(), kMagic.data(), 4) != 0) return std::nullopt;
    if (datagram[4] != kVersion) return std::nullopt;
    if (datagram[5] != static_cast<uint8_t>(PacketKind::probe) &&
        datagram[5] != static_cast<uint8_t>(PacketKind::echo))
        return std::nullopt;
    RallyPacket p;
    p.kind = static_cast<PacketKind>(datagram[5]);
    std::memcpy(p.session_id.data(), datagram.data() + 6, 16);
    p.seq = get_u32(datagram, 22);
    return p;
}

std::vector<uint8_t> encode(const Frame& f) {
    std::vector<uint8_t> out;
    out.reserve(kFrameHeaderSize + f.payload.size());
    out.push_back(static_cast<uint8_t>(f.type));
    put_u32(out, static_cast<uint32_t>(f.payload.size()));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

std::optional<Frame> decode_frame(std::span<const uint8_t> buffer, size_t& consumed) {
    consumed = 0;
    if (buffer.size() < kFrameHeaderSize) return std::nullopt;
    const uint8_t type = buffer[0];
    if (type < static_cast<uint8_t>(FrameType::discard_set) ||
        type > static_cast<uint8_t>(FrameType::key_digest))
        throw std::invalid_argument("unknown frame type on reconciliation stream");
    const uint32_t length = get_u32(buffer, 1);
    if (buffer.size() < kFrameHeaderSize + length) return std::nullopt;
    Frame f;
    f.type = static_cast<FrameType>(type);
    f.payload.assign(buffer.begin() + kFrameHeaderSize,
                     buffer.begin() + kFrameHeaderSize + length);
    consumed = kFrameHeaderSize + length;
    return f;
}

Frame make_discard_set(const DiscardSet& set) {
    Frame f;
    f.type = FrameType::discard_set;
    put_u32(f.payload, static_cast<uint32_t>(set.size()));
    for (uint32_t index : set.indices()) put_u32(f.payload, index);
    return f;
}

DiscardSet parse_discard_set(const Frame& f) {
    if (f.type != FrameType::discard_set) malformed("not a DISCARD_SET");
    if (f.payload.size() < 4) malformed("DISCARD_SET shorter than its count field");
    const uint32_t count = get_u32(f.payload, 0);
    if (f.payload.size() != 4 + static_cast<size_t>(count) * 4)
        malformed("DISCARD_SET length disagrees with count");
    std::vector<uint32_t> indices;
    indices.reserve(count);
    for (uint32_t i = 0; i < count; ++i) indices.push_back(get_u32(f.payload, 4 + i * 4));
    return DiscardSet(std::move(indices)); // validates strict ordering
}

Frame make_parity_vector(const ParityVector& pv) {
    Frame f;
    f.type = FrameType::parity_vector;
    f.payload.push_back(pv.iteration);
    put_u32(f.payload, static_cast<uint32_t>(pv.bits.size()));
    f.payload.insert(f.payload.end(), pv.bits.bytes().begin(), pv.bits.bytes().end());
    return f;
}

ParityVector parse_parity_vector(const Frame& f) {
    if (f.type != FrameType::parity_vector) malformed("not a PARITY_VECTOR");
    if (f.payload.size() < 5) malformed("PARITY_VECTOR shorter than its header");
    const uint32_t bit_count = get_u32(f.payload, 1);
    const size_t expected = 5 + BitString::byte_count_for(bit_count);
    if (f.payload.size() != expected)
        malformed("PARITY_VECTOR length disagrees with bit count");
    ParityVector pv;
    pv.iteration = f.payload[0];
    pv.bits = BitString::from_bytes(
        std::vector<uint8_t>(f.payload.begin() + 5, f.payload.end()), bit_count);
    return pv;
}

Frame make_plan_commit(const PlanCommit& pc) {
    Frame f;
    f.type = FrameType::plan_commit;
    put_u32(f.payload, pc.total_iterations);
    put_u32(f.payload, pc.pa_block_size);
    return f;
}

PlanCommit parse_plan_commit(const Frame& f) {
    if (f.type != FrameType::plan_commit) malformed("not a PLAN_COMMIT");
    if (f.payload.size() != 8) malformed("PLAN_COMMIT must be 8 bytes");
    return PlanCommit{get_u32(f.payload, 0), get_u32(f.payload, 4)};
}

Frame make_key_digest(const std::array<uint8_t, 32>& digest) {
    Frame f;
    f.type = FrameType::key_digest;
    f.payload.assign(digest.begin(), digest.end());
    return f;
}

std::array<uint8_t, 32> parse_key_digest(const Frame& f) {
    if (f.type != FrameType::key_digest) malformed("not a KEY_DIGEST");
    if (f.payload.size() != 32) malformed("KEY_DIGEST must be 32 bytes");
    std::array<uint8_t, 32> out{};
    std::memcpy(out.data(), f.payload.data(), 32);
    return out;
}

} // namespace ksrt::wire
