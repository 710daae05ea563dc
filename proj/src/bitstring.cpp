#include "ksrt/bitstring.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace ksrt {

BitString BitString::from_string(const std::string& zeros_and_ones) {
    BitString out;
    for (char c : zeros_and_ones) {
        if (c == ' ') continue;
        if (c != '0' && c != '1')
            throw std::invalid_argument("BitString literal may contain only 0, 1 and spaces");
        out.append(c == '1');
    }
    return out;
}

BitString BitString::from_bytes(std::vector<uint8_t> bytes, size_t bit_count) {
    if (bytes.size() != byte_count_for(bit_count))
        throw std::invalid_argument("packed byte count does not match bit length");
    BitString out;
    out.bytes_ = std::move(bytes);
    out.nbits_ = bit_count;
    if (bit_count % 8 != 0 && !out.bytes_.empty())
        out.bytes_.back() &= static_cast<uint8_t>(0xff << (8 - bit_count % 8));
    return out;
}

void BitString::append(bool bit) {
    if (nbits_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<uint8_t>(0x80 >> (nbits_ % 8));
    ++nbits_;
}

bool BitString::bit(size_t i) const {
    if (i >= nbits_) throw std::out_of_range("bit index out of range");
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
}

void BitString::set_bit(size_t i, bool value) {
    if (i >= nbits_) throw std::out_of_range("bit index out of range");
    const uint8_t mask = static_cast<uint8_t>(0x80 >> (i & 7));
    if (value)
        bytes_[i >> 3] |= mask;
    else
        bytes_[i >> 3] &= static_cast<uint8_t>(~mask);
}

BitString BitString::xored(const BitString& other) const {
    if (nbits_ != other.nbits_)
        throw std::invalid_argument("xor of bit strings with different lengths");
    BitString out = *this;
    for (size_t i = 0; i < bytes_.size(); ++i) out.bytes_[i] ^= other.bytes_[i];
    return out;
}

size_t BitString::hamming_distance(const BitString& other) const {
    if (nbits_ != other.nbits_)
        throw std::invalid_argument("hamming distance of bit strings with different lengths");
    size_t d = 0;
    for (size_t i = 0; i < bytes_.size(); ++i)
        d += std::popcount(static_cast<unsigned>(bytes_[i] ^ other.bytes_[i]));
    return d;
}

size_t BitString::popcount() const {
    size_t n = 0;
    for (uint8_t b : bytes_) n += std::popcount(static_cast<unsigned>(b));
    return n;
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(nbits_);
    for (size_t i = 0; i < nbits_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
}

void BitString::wipe() {
    std::fill(bytes_.begin(), bytes_.end(), uint8_t{0});
    bytes_.clear();
    nbits_ = 0;
}

} // namespace ksrt
