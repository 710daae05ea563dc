#ifndef KSRT_SIM_HPP
#define KSRT_SIM_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ksrt/bitstring.hpp"
#include "ksrt/delay_model.hpp"
#include "ksrt/extraction.hpp"
#include "ksrt/rtt_source.hpp"

namespace ksrt::sim {

// Kernel execution selector. Every Monte Carlo kernel has a plain
// sequential implementation and an OpenMP one; both consume the same
// per-chunk random streams, so for a given seed they produce identical
// results and the serial path doubles as the reference in tests.
enum class Parallelism { serial, parallel };

// ---------------------------------------------------------------------
// Chain simulator
// ---------------------------------------------------------------------

// Ordered hop delays between the initiator and the responder, plus the
// eavesdropper's tap point and timestamping noise. eve_position = p
// places the tap between hop p-1 and hop p; p = 0 taps directly at the
// initiator's interface.
struct ChainTopology {
    std::vector<DelayModel> hops;
    uint32_t eve_position = 1;
    DelayModel eve_jitter{DelayKind::constant, 0.0, 0.0, 0.0};

    void validate() const;
};

// Three-hop chain with a LAN tap next to the initiator and two WAN
// hops; eavesdropper jitter at 5% of the WAN hop scale.
ChainTopology default_topology();

// The eavesdropper's measured interval for one round: time between the
// probe passing her tap outbound and the echo passing it inbound, plus
// timestamping noise.
struct EveObservation {
    int64_t interval_ns = 0;
    bool valid = false;
};

struct RallyWorld {
    std::vector<RttSample> initiator;
    std::vector<RttSample> responder;
    std::vector<EveObservation> eve; // one per round
};

// Simulates `rounds` chained probe/echo exchanges. Each directed hop
// traversal draws an independent delay; each packet is dropped with
// drop_prob. Sample pairing follows the transport rule: the initiator's
// round i and the responder's round i share the echo transit, and the
// responder's last sample is never completed.
RallyWorld simulate_rallies(const ChainTopology& topology, uint32_t rounds,
                            double drop_prob, uint64_t seed,
                            Parallelism par = Parallelism::parallel);

// ---------------------------------------------------------------------
// Monte Carlo kernels
// ---------------------------------------------------------------------

// Disagreement rate between the two endpoints' median-thresholded sums
// in the three-transit model: per round draws T1, T2, T3 i.i.d. from
// `model` and compares T1+T2 against T2+T3, each side using its own
// empirical median. Converges to 1/3 for symmetric models.
double monte_carlo_ber(const DelayModel& model, uint32_t rounds, uint64_t seed,
                       Parallelism par = Parallelism::parallel);

// Empirical XOR-of-k-bits error rate when each bit is independently
// wrong with probability eps. Checks the piling-up formula.
double eve_parity_error_mc(double eps, uint32_t k, uint64_t blocks, uint64_t seed,
                           Parallelism par = Parallelism::parallel);

// Block-parity disagreement rate for very small per-bit error rates,
// via geometric gap sampling; runs in O(expected flips).
double block_disagreement_mc(double per_bit_ber, uint32_t k, uint64_t blocks,
                             uint64_t seed);

// ---------------------------------------------------------------------
// Bit-level helpers shared by simulations and tests
// ---------------------------------------------------------------------

BitString random_bits(size_t count, uint64_t seed);

// Transmits `source` through a BSC(e): each bit flips independently.
BitString bsc_transmit(const BitString& source, double e, uint64_t seed);

// Threshold a value sequence by its own median. Exact ties resolve
// upward; intended for the eavesdropper, who cannot ask anyone to
// discard her tied rounds.
BitString threshold_by_median(std::span<const int64_t> values);

// Replays the public keep decisions of a reconciliation run on the
// eavesdropper's bit estimate. parity_transcript holds both endpoints'
// parity vectors per iteration; a pair is kept where they agree.
// Returns the eavesdropper's BER against the true (initiator) kept
// string after each iteration.
std::vector<double> eve_track_reconciliation(
    const BitString& eve_bits, const BitString& initiator_bits,
    std::span<const std::pair<BitString, BitString>> parity_transcript);

// ---------------------------------------------------------------------
// Session plumbing
// ---------------------------------------------------------------------

// Rally backend for sessions driven by the simulated chain. Both
// processes of a session construct the same world from (topology, seed)
// and take their role's view of it, so their samples stay correlated
// exactly as a real rally's would.
class SimulatedRallySource final : public RttSource {
public:
    enum class Side { initiator, responder };

    SimulatedRallySource(ChainTopology topology, uint64_t seed, Side side,
                         double drop_prob = 0.0)
        : topology_(std::move(topology)), seed_(seed), side_(side),
          drop_prob_(drop_prob) {}

    std::vector<RttSample> rally(uint32_t rounds) override;

    // Full world of the last rally, for ground-truth analysis.
    const RallyWorld& world() const { return world_; }

private:
    ChainTopology topology_;
    uint64_t seed_;
    Side side_;
    double drop_prob_;
    RallyWorld world_;
};

// Everything both endpoints and the eavesdropper would hold after the
// discard and tie exchanges, reconstructed deterministically from a
// simulated world. The discard logic here mirrors the session engine's.
struct EveGroundTruth {
    BitString initiator_bits;
    BitString responder_bits;
    BitString eve_bits;
    std::vector<uint32_t> surviving_rounds;
    double eve_initial_ber = 0.5;      // against the initiator's bits
    double channel_initial_ber = 0.5;  // initiator vs responder
};

EveGroundTruth compute_eve_ground_truth(const RallyWorld& world);

} // namespace ksrt::sim

#endif
