#ifndef KSRT_SESSION_HPP
#define KSRT_SESSION_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "ksrt/channel.hpp"
#include "ksrt/planner.hpp"
#include "ksrt/privacy_amplification.hpp"
#include "ksrt/rtt_source.hpp"
#include "ksrt/sim.hpp"

namespace ksrt {

// Callbacks into the running session; used by the simulator driver to
// record the public transcript. Everything passed here is information
// an on-path eavesdropper also has.
struct SessionObserver {
    std::function<void(const BitString& aligned_bits,
                       const std::vector<uint32_t>& surviving_rounds)>
        on_aligned;
    std::function<void(const BitString& local_parities, const BitString& remote_parities)>
        on_parity_exchange;
};

struct SessionConfig {
    wire::SessionId session_id{};
    uint32_t rounds = 30000;
    planner::PlannerConfig planner{};
    SessionObserver* observer = nullptr;
};

struct IterationRecord {
    stats::ParityStats parity;
    uint64_t length_after = 0;
};

// Everything in here except elapsed time and key rate is a shared
// statistic: both endpoints compute identical values from identical
// public data.
struct SessionReport {
    uint32_t rounds = 0;
    uint64_t local_timeouts = 0;
    uint64_t union_discards = 0;
    uint64_t ties = 0;
    uint64_t raw_bits = 0;
    std::vector<IterationRecord> iterations;
    planner::ReconciliationPlan plan{};
    stats::BerInterval estimated_ber{};
    double secrecy_upper_bound = 0.0;
    uint64_t final_key_bits = 0;
    double elapsed_seconds = 0.0;
    double key_rate_bits_per_minute = 0.0;
};

struct SessionResult {
    FinalKey key;
    SessionReport report;
};

// Full lock-step key agreement over an established rally source and
// frame channel: rally, discard exchange, extraction, tie exchange,
// adaptive reconcile/plan loop, privacy amplification, and digest
// confirmation. Throws SessionAbort; any abort wipes key material and
// closes the channel.
SessionResult run_keygen_session(RttSource& source, MessageChannel& channel,
                                 const SessionConfig& config);

// One whole session simulated in-process: both endpoints run the real
// engine over an in-memory channel pair, sharing a deterministic world.
// Ground-truth bit error rates for the channel and the eavesdropper are
// tracked through every iteration.
struct SimulatedSession {
    SessionResult initiator;
    SessionResult responder;
    sim::EveGroundTruth ground_truth;
    // State 0 is the raw extracted string; state i > 0 follows iteration i.
    std::vector<double> ab_ber_by_state;
    std::vector<double> eve_ber_by_state;
};

SimulatedSession run_simulated_session(const sim::ChainTopology& topology,
                                       const SessionConfig& config, uint64_t seed,
                                       double drop_prob);

// The eavesdropper-floor sanity gate used by simulation-backed runs:
// when the simulated eavesdropper's raw estimate is already better than
// the assumed post-reconciliation floor, the assumption is void and the
// session must refuse. Throws SessionAbort{secrecy_impossible}.
void require_eve_floor_plausible(const sim::EveGroundTruth& gt, double eve_ber_floor);

} // namespace ksrt

#endif
