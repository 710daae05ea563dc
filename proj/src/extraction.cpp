#include "ksrt/extraction.hpp"

#include <algorithm>
#include <stdexcept>

namespace ksrt {

DiscardSet::DiscardSet(std::vector<uint32_t> sorted_indices)
    : indices_(std::move(sorted_indices)) {
    for (size_t i = 1; i < indices_.size(); ++i)
        if (indices_[i - 1] >= indices_[i])
            throw std::invalid_argument("discard indices must be strictly increasing");
}

void DiscardSet::insert(uint32_t index) {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
    if (it != indices_.end() && *it == index) return;
    indices_.insert(it, index);
}

bool DiscardSet::contains(uint32_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

DiscardSet DiscardSet::united_with(const DiscardSet& other) const {
    std::vector<uint32_t> merged;
    merged.reserve(indices_.size() + other.indices_.size());
    std::set_union(indices_.begin(), indices_.end(),
                   other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(merged));
    return DiscardSet(std::move(merged));
}

bool DiscardSet::is_superset_of(const DiscardSet& other) const {
    return std::includes(indices_.begin(), indices_.end(),
                         other.indices_.begin(), other.indices_.end());
}

DiscardSet local_discards(std::span<const RttSample> samples) {
    DiscardSet out;
    std::vector<bool> seen(samples.size(), false);
    for (const RttSample& s : samples) {
        if (s.index < samples.size()) {
            if (seen[s.index])
                throw std::invalid_argument("duplicate sample index");
            seen[s.index] = true;
        }
        if (s.status == SampleStatus::timed_out) out.insert(s.index);
    }
    return out;
}

std::vector<RttSample> apply_discards(std::span<const RttSample> samples,
                                      const DiscardSet& union_set) {
    std::vector<RttSample> survivors;
    survivors.reserve(samples.size());
    for (const RttSample& s : samples) {
        if (union_set.contains(s.index)) continue;
        if (s.status == SampleStatus::timed_out)
            throw std::invalid_argument(
                "discard union omits a locally timed-out index; endpoints would desynchronize");
        survivors.push_back(s);
    }
    return survivors;
}

Extraction extract_bits(std::span<const RttSample> survivors) {
    if (survivors.size() < 2)
        throw std::invalid_argument("median extraction needs at least 2 samples");

    std::vector<int64_t> rtts;
    rtts.reserve(survivors.size());
    for (const RttSample& s : survivors) rtts.push_back(s.rtt_ns);

    const size_t n = rtts.size();
    const size_t mid = n / 2;
    std::nth_element(rtts.begin(), rtts.begin() + mid, rtts.end());
    int64_t median2;
    if (n % 2 == 1) {
        median2 = 2 * rtts[mid];
    } else {
        const int64_t upper = rtts[mid];
        const int64_t lower = *std::max_element(rtts.begin(), rtts.begin() + mid);
        median2 = lower + upper;
    }

    Extraction out;
    out.median_times_two = median2;
    for (const RttSample& s : survivors) {
        const int64_t twice = 2 * s.rtt_ns;
        if (twice == median2) {
            out.ties.insert(s.index);
        } else {
            out.bits.append(twice > median2);
            out.encoded_indices.push_back(s.index);
        }
    }
    return out;
}

BitString remove_tied(const Extraction& extraction, const DiscardSet& tie_union) {
    BitString out;
    for (size_t i = 0; i < extraction.encoded_indices.size(); ++i) {
        if (tie_union.contains(extraction.encoded_indices[i])) continue;
        out.append(extraction.bits.bit(i));
    }
    return out;
}

} // namespace ksrt
