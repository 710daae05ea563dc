#ifndef KSRT_RECONCILE_HPP
#define KSRT_RECONCILE_HPP

#include <cstdint>
#include <vector>

#include "ksrt/bitstring.hpp"
#include "ksrt/channel.hpp"
#include "ksrt/stats.hpp"

namespace ksrt {

// Output of one bit-pair iteration.
struct IterationResult {
    BitString kept;
    stats::ParityStats parity;
    uint32_t iteration_index = 0;
};

// Public record of a reconciliation run. Lengths strictly decrease
// every iteration (halving minus mismatches).
struct ReconciliationTranscript {
    std::vector<stats::ParityStats> iterations;
    uint64_t initial_length = 0;
    uint64_t final_length = 0;

    void record(const IterationResult& result) {
        iterations.push_back(result.parity);
        final_length = result.kept.size();
    }
};

// Parity of adjacent disjoint pairs: out[i] = bits[2i] xor bits[2i+1].
// An odd trailing bit is excluded (and will be discarded).
BitString pair_parities(const BitString& bits);

// Keeps the first bit of every pair whose local and remote parities
// agree; disagreeing pairs lose both bits. Throws SessionAbort{desync}
// on a parity-vector length mismatch.
IterationResult keep_agreeing(const BitString& bits,
                              const BitString& local_parities,
                              const BitString& remote_parities,
                              uint32_t iteration_index);

// One lock-step iteration over the message channel: exchange
// PARITY_VECTOR frames, then apply keep_agreeing. Both endpoints obtain
// identical ParityStats and equal kept lengths. When `exchanged` is
// given it receives the (local, remote) parity vectors, which are the
// public transcript an eavesdropper sees.
IterationResult run_iteration(const BitString& bits, MessageChannel& channel,
                              uint32_t iteration_index,
                              std::pair<BitString, BitString>* exchanged = nullptr);

} // namespace ksrt

#endif
