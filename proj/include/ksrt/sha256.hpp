#ifndef KSRT_SHA256_HPP
#define KSRT_SHA256_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace ksrt {

// FIPS 180-4 SHA-256. Small incremental implementation; checked against
// the standard test vectors in the unit tests.
class Sha256 {
public:
    Sha256();

    void update(std::span<const uint8_t> data);
    std::array<uint8_t, 32> finish();

    static std::array<uint8_t, 32> digest(std::span<const uint8_t> data);

private:
    void process_block(const uint8_t* block);

    std::array<uint32_t, 8> state_{};
    std::array<uint8_t, 64> buffer_{};
    uint64_t total_bytes_ = 0;
    size_t buffered_ = 0;
};

std::string to_hex(std::span<const uint8_t> bytes);

} // namespace ksrt

#endif
