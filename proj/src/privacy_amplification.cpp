#include "ksrt/privacy_amplification.hpp"

#include <stdexcept>

#include "ksrt/sha256.hpp"

namespace ksrt {

BitString parity_compress(const BitString& bits, uint32_t k) {
    if (k < 1) throw std::invalid_argument("block size must be >= 1");
    BitString out;
    const size_t blocks = bits.size() / k;
    for (size_t b = 0; b < blocks; ++b) {
        bool parity = false;
        for (size_t i = 0; i < k; ++i) parity ^= bits.bit(b * k + i);
        out.append(parity);
    }
    return out;
}

void FinalKey::destroy() {
    key.wipe();
    digest.fill(0);
}

FinalKey finalize_key(const BitString& reconciled, uint32_t k,
                      const wire::SessionId& session_id) {
    static constexpr char kTag[] = "ksrt-key-confirm-v1";

    FinalKey out;
    out.key = parity_compress(reconciled, k);
    out.session_id = session_id;

    Sha256 h;
    h.update(out.key.bytes());
    h.update(session_id);
    h.update({reinterpret_cast<const uint8_t*>(kTag), sizeof(kTag) - 1});
    out.digest = h.finish();
    return out;
}

bool verify_key(const FinalKey& local, const std::array<uint8_t, 32>& remote_digest) {
    return local.digest == remote_digest;
}

} // namespace ksrt
