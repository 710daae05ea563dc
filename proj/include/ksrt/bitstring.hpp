#ifndef KSRT_BITSTRING_HPP
#define KSRT_BITSTRING_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ksrt {

// Packed sequence of key bits. Bit i lives in byte i/8 at mask
// 0x80 >> (i%8), i.e. MSB-first, which is also the wire order of
// PARITY_VECTOR payloads. Trailing pad bits of the last byte are
// always zero.
class BitString {
public:
    BitString() = default;

    static BitString from_string(const std::string& zeros_and_ones);
    // Takes ownership of packed bytes; pad bits are cleared.
    static BitString from_bytes(std::vector<uint8_t> bytes, size_t bit_count);

    void append(bool bit);
    bool bit(size_t i) const;
    void set_bit(size_t i, bool value);

    size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    const std::vector<uint8_t>& bytes() const { return bytes_; }
    static size_t byte_count_for(size_t bits) { return (bits + 7) / 8; }

    BitString xored(const BitString& other) const;
    size_t hamming_distance(const BitString& other) const;
    size_t popcount() const;

    std::string to_string() const;

    // Overwrites the packed storage with zeros. Key material hygiene on
    // aborted sessions.
    void wipe();

    bool operator==(const BitString& other) const = default;

private:
    std::vector<uint8_t> bytes_;
    size_t nbits_ = 0;
};

} // namespace ksrt

#endif
