#ifndef KSRT_PRIVACY_AMPLIFICATION_HPP
#define KSRT_PRIVACY_AMPLIFICATION_HPP

#include <array>
#include <cstdint>

#include "ksrt/bitstring.hpp"
#include "ksrt/wire.hpp"

namespace ksrt {

// Block-parity hashing: output bit i is the XOR of input bits
// [i*k, i*k + k). Leftover bits short of a full block are discarded.
BitString parity_compress(const BitString& bits, uint32_t k);

struct FinalKey {
    BitString key;
    std::array<uint8_t, 32> digest{};
    wire::SessionId session_id{};

    // Zeroizes the key material; called on any abort after PA.
    void destroy();
};

// Compresses the reconciled string and binds the confirmation digest:
// SHA-256 over key bytes || session id || a fixed role-independent tag.
FinalKey finalize_key(const BitString& reconciled, uint32_t k,
                      const wire::SessionId& session_id);

// Key confirmation: both sides exchanged 32-byte digests; agreement
// means the compressed keys are identical (up to hash collision).
bool verify_key(const FinalKey& local, const std::array<uint8_t, 32>& remote_digest);

} // namespace ksrt

#endif
