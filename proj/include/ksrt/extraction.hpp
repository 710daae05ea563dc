#ifndef KSRT_EXTRACTION_HPP
#define KSRT_EXTRACTION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ksrt/bitstring.hpp"

namespace ksrt {

enum class SampleStatus : uint8_t { ok, timed_out };

// One round-trip measurement. rtt_ns is a monotonic-clock difference and
// is meaningful only when status == ok.
struct RttSample {
    uint32_t index = 0;
    int64_t rtt_ns = 0;
    SampleStatus status = SampleStatus::timed_out;
};

// Sorted set of round indices both endpoints agree to drop. Strictly
// increasing; exchanged verbatim in DISCARD_SET frames.
class DiscardSet {
public:
    DiscardSet() = default;
    explicit DiscardSet(std::vector<uint32_t> sorted_indices);

    void insert(uint32_t index);
    bool contains(uint32_t index) const;
    size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }

    const std::vector<uint32_t>& indices() const { return indices_; }

    DiscardSet united_with(const DiscardSet& other) const;
    bool is_superset_of(const DiscardSet& other) const;

    bool operator==(const DiscardSet& other) const = default;

private:
    std::vector<uint32_t> indices_;
};

// Indices with status == timed_out. Errors on duplicate sample indices.
DiscardSet local_discards(std::span<const RttSample> samples);

// Drops every sample whose index is in the union set, preserving order.
// The union must cover all locally timed-out indices, otherwise the two
// endpoints would diverge.
std::vector<RttSample> apply_discards(std::span<const RttSample> samples,
                                      const DiscardSet& union_set);

// Result of median thresholding. Samples equal to the median are not
// encoded; their indices go to `ties` for a second discard exchange.
// encoded_indices[i] is the original round index of bits[i].
struct Extraction {
    BitString bits;
    DiscardSet ties;
    std::vector<uint32_t> encoded_indices;
    // median as an exact rational: (numerator) / 2 nanoseconds.
    int64_t median_times_two = 0;
};

// Median thresholding over this party's surviving samples: above the
// median encodes 1, below encodes 0. Needs at least 2 survivors.
// Even survivor counts use the mean of the two middle values, held as
// an exact twice-the-median integer so equality is never a float test.
Extraction extract_bits(std::span<const RttSample> survivors);

// Final aligned bit string: encoded bits whose round index is not in the
// exchanged tie union. Non-tie bits do not depend on which other rounds
// are dropped, so both endpoints end with equal-length strings.
BitString remove_tied(const Extraction& extraction, const DiscardSet& tie_union);

} // namespace ksrt

#endif
