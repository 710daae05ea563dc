#include "ksrt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksrt::sim {

namespace {

// Rounds (or blocks) are generated in fixed-size chunks, each from its
// own derived random stream. Work is distributed over chunks, and all
// reductions are integer sums, so serial and OpenMP execution produce
// bit-for-bit identical results.
constexpr uint32_t kChunkRounds = 1u << 14;

uint64_t chunk_count(uint64_t total, uint64_t per_chunk) {
    return (total + per_chunk - 1) / per_chunk;
}

double median_of(std::vector<double> values) {
    const size_t n = values.size();
    const size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    if (n % 2 == 1) return values[mid];
    const double upper = values[mid];
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

// ------------------------------------------------------------------
// monte_carlo_ber
// ------------------------------------------------------------------

void mc_fill_chunk(const DelayModel& model, uint64_t seed, uint64_t chunk,
                   uint32_t rounds, double* a, double* b) {
    rng::Stream stream(rng::derive_seed(seed, chunk));
    const uint64_t begin = chunk * kChunkRounds;
    const uint64_t end = std::min<uint64_t>(begin + kChunkRounds, rounds);
    for (uint64_t r = begin; r < end; ++r) {
        const double t1 = sample_delay_ns(model, stream);
        const double t2 = sample_delay_ns(model, stream);
        const double t3 = sample_delay_ns(model, stream);
        a[r] = t1 + t2;
        b[r] = t2 + t3;
    }
}

} // namespace

double monte_carlo_ber(const DelayModel& model, uint32_t rounds, uint64_t seed,
                       Parallelism par) {
    if (rounds < 1000)
        throw std::invalid_argument("monte_carlo_ber needs at least 1000 rounds");

    std::vector<double> a(rounds), b(rounds);
    const int64_t chunks = static_cast<int64_t>(chunk_count(rounds, kChunkRounds));

    if (par == Parallelism::parallel) {
        #pragma omp parallel for schedule(static)
        for (int64_t c = 0; c < chunks; ++c)
            mc_fill_chunk(model, seed, static_cast<uint64_t>(c), rounds, a.data(), b.data());
    } else {
        for (int64_t c = 0; c < chunks; ++c)
            mc_fill_chunk(model, seed, static_cast<uint64_t>(c), rounds, a.data(), b.data());
    }

    const double median_a = median_of(a);
    const double median_b = median_of(b);

    uint64_t disagreements = 0;
    if (par == Parallelism::parallel) {
        int64_t n = rounds;
        #pragma omp parallel for schedule(static) reduction(+ : disagreements)
        for (int64_t r = 0; r < n; ++r)
            disagreements += (a[r] > median_a) != (b[r] > median_b);
    } else {
        for (uint32_t r = 0; r < rounds; ++r)
            disagreements += (a[r] > median_a) != (b[r] > median_b);
    }
    return static_cast<double>(disagreements) / static_cast<double>(rounds);
}

// ------------------------------------------------------------------
// eve_parity_error_mc
// ------------------------------------------------------------------

namespace {

uint64_t parity_chunk_mismatches(double eps, uint32_t k, uint64_t seed,
                                 uint64_t chunk, uint64_t blocks) {
    rng::Stream stream(rng::derive_seed(seed, chunk));
    const uint64_t begin = chunk * kChunkRounds;
    const uint64_t end = std::min(begin + kChunkRounds, blocks);
    uint64_t odd = 0;
    for (uint64_t b = begin; b < end; ++b) {
        bool parity = false;
        for (uint32_t i = 0; i < k; ++i) parity ^= stream.bernoulli(eps);
        odd += parity;
    }
    return odd;
}

} // namespace

double eve_parity_error_mc(double eps, uint32_t k, uint64_t blocks, uint64_t seed,
                           Parallelism par) {
    if (blocks == 0) throw std::invalid_argument("need at least one block");
    if (k == 0) throw std::invalid_argument("block size must be >= 1");

    const int64_t chunks = static_cast<int64_t>(chunk_count(blocks, kChunkRounds));
    uint64_t odd = 0;
    if (par == Parallelism::parallel) {
        #pragma omp parallel for schedule(static) reduction(+ : odd)
        for (int64_t c = 0; c < chunks; ++c)
            odd += parity_chunk_mismatches(eps, k, seed, static_cast<uint64_t>(c), blocks);
    } else {
        for (int64_t c = 0; c < chunks; ++c)
            odd += parity_chunk_mismatches(eps, k, seed, static_cast<uint64_t>(c), blocks);
    }
    return static_cast<double>(odd) / static_cast<double>(blocks);
}

// ------------------------------------------------------------------
// block_disagreement_mc
// ------------------------------------------------------------------

double block_disagreement_mc(double per_bit_ber, uint32_t k, uint64_t blocks,
                             uint64_t seed) {
    if (k == 0) throw std::invalid_argument("block size must be >= 1");
    if (!(per_bit_ber >= 0.0 && per_bit_ber < 1.0))
        throw std::domain_error("per-bit BER must lie in [0, 1)");
    if (per_bit_ber == 0.0) return 0.0;

    // Flip positions arrive as geometric gaps, so the cost scales with
    // the expected flip count, not the bit count.
    rng::Stream stream(rng::derive_seed(seed, 0));
    const double total_bits = static_cast<double>(blocks) * static_cast<double>(k);
    const double log_keep = std::log1p(-per_bit_ber);

    std::vector<uint64_t> flipped_blocks;
    double position = -1.0;
    for (;;) {
        const double gap = std::floor(std::log(stream.uniform_open()) / log_keep);
        position += 1.0 + gap;
        if (position >= total_bits) break;
        flipped_blocks.push_back(static_cast<uint64_t>(position) / k);
    }

    std::sort(flipped_blocks.begin(), flipped_blocks.end());
    uint64_t odd = 0;
    for (size_t i = 0; i < flipped_blocks.size();) {
        size_t j = i;
        while (j < flipped_blocks.size() && flipped_blocks[j] == flipped_blocks[i]) ++j;
        odd += (j - i) % 2;
        i = j;
    }
    return static_cast<double>(odd) / static_cast<double>(blocks);
}

// ------------------------------------------------------------------
// Chain simulator
// ------------------------------------------------------------------

void ChainTopology::validate() const {
    if (hops.empty()) throw std::invalid_argument("topology needs at least one hop");
    if (eve_position > hops.size())
        throw std::invalid_argument("eve position outside the chain");
}

ChainTopology default_topology() {
    ChainTopology t;
    // LAN tap segment, then two WAN hops; locations keep draws positive
    // and give a round trip in the hundreds of milliseconds.
    t.hops = {
        DelayModel{DelayKind::normal, 10e6, 1.5e6, 0.0},  // initiator <-> tap
        DelayModel{DelayKind::normal, 80e6, 10e6, 0.0},   // tap <-> relay
        DelayModel{DelayKind::normal, 120e6, 10e6, 0.0},  // relay <-> responder
    };
    t.eve_position = 1;
    t.eve_jitter = DelayModel{DelayKind::normal, 0.0, 0.5e6, 0.0}; // 5% of WAN scale
    return t;
}

namespace {

struct RoundDraws {
    std::vector<double> u_total;   // outbound transit per round
    std::vector<double> v_total;   // inbound transit per round
    std::vector<double> eve_span;  // sum over hops >= eve_position, both directions
    std::vector<double> eve_noise;
    std::vector<uint8_t> probe_dropped;
    std::vector<uint8_t> echo_dropped;
};

void rally_fill_chunk(const ChainTopology& topo, double drop_prob, uint64_t seed,
                      uint64_t chunk, uint32_t rounds, RoundDraws& d) {
    rng::Stream stream(rng::derive_seed(seed, chunk));
    const size_t hop_count = topo.hops.size();
    const uint64_t begin = chunk * kChunkRounds;
    const uint64_t end = std::min<uint64_t>(begin + kChunkRounds, rounds);
    for (uint64_t r = begin; r < end; ++r) {
        d.probe_dropped[r] = stream.bernoulli(drop_prob);
        double u = 0.0, span = 0.0;
        for (size_t j = 0; j < hop_count; ++j) {
            const double delay = sample_delay_ns(topo.hops[j], stream);
            u += delay;
            if (j >= topo.eve_position) span += delay;
        }
        d.echo_dropped[r] = stream.bernoulli(drop_prob);
        double v = 0.0;
        for (size_t jj = hop_count; jj-- > 0;) {
            const double delay = sample_delay_ns(topo.hops[jj], stream);
            v += delay;
            if (jj >= topo.eve_position) span += delay;
        }
        d.u_total[r] = u;
        d.v_total[r] = v;
        d.eve_span[r] = span;
        d.eve_noise[r] = sample_noise_ns(topo.eve_jitter, stream);
    }
}

} // namespace

RallyWorld simulate_rallies(const ChainTopology& topology, uint32_t rounds,
                            double drop_prob, uint64_t seed, Parallelism par) {
    topology.validate();
    if (rounds < 1) throw std::invalid_argument("need at least one round");
    if (!(drop_prob >= 0.0 && drop_prob < 1.0))
        throw std::invalid_argument("drop probability must lie in [0, 1)");

    RoundDraws d;
    d.u_total.resize(rounds);
    d.v_total.resize(rounds);
    d.eve_span.resize(rounds);
    d.eve_noise.resize(rounds);
    d.probe_dropped.resize(rounds);
    d.echo_dropped.resize(rounds);

    const int64_t chunks = static_cast<int64_t>(chunk_count(rounds, kChunkRounds));
    if (par == Parallelism::parallel) {
        #pragma omp parallel for schedule(static)
        for (int64_t c = 0; c < chunks; ++c)
            rally_fill_chunk(topology, drop_prob, seed, static_cast<uint64_t>(c), rounds, d);
    } else {
        for (int64_t c = 0; c < chunks; ++c)
            rally_fill_chunk(topology, drop_prob, seed, static_cast<uint64_t>(c), rounds, d);
    }

    RallyWorld world;
    world.initiator.resize(rounds);
    world.responder.resize(rounds);
    world.eve.resize(rounds);

    for (uint32_t r = 0; r < rounds; ++r) {
        RttSample& ini = world.initiator[r];
        ini.index = r;
        if (!d.probe_dropped[r] && !d.echo_dropped[r]) {
            ini.status = SampleStatus::ok;
            ini.rtt_ns = std::llround(d.u_total[r] + d.v_total[r]);
        }

        // The responder's sample r runs from its echo of round r to the
        // arrival of probe r+1; a dropped probe on either side of that
        // window shows up as a sequence gap and the sample is timed out.
        RttSample& rsp = world.responder[r];
        rsp.index = r;
        if (r + 1 < rounds && !d.probe_dropped[r] && !d.probe_dropped[r + 1]) {
            rsp.status = SampleStatus::ok;
            rsp.rtt_ns = std::llround(d.v_total[r] + d.u_total[r + 1]);
        }

        EveObservation& eve = world.eve[r];
        if (!d.probe_dropped[r] && !d.echo_dropped[r]) {
            eve.valid = true;
            eve.interval_ns = std::llround(d.eve_span[r] + d.eve_noise[r]);
        }
    }
    return world;
}

// ------------------------------------------------------------------
// Bit helpers
// ------------------------------------------------------------------

BitString random_bits(size_t count, uint64_t seed) {
    rng::Stream stream(rng::derive_seed(seed, 0));
    BitString out;
    for (size_t i = 0; i < count; ++i) out.append(stream.next_u64() >> 63);
    return out;
}

BitString bsc_transmit(const BitString& source, double e, uint64_t seed) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::domain_error("BSC error rate outside [0, 1]");
    rng::Stream stream(rng::derive_seed(seed, 0));
    BitString out;
    for (size_t i = 0; i < source.size(); ++i)
        out.append(source.bit(i) != stream.bernoulli(e));
    return out;
}

BitString threshold_by_median(std::span<const int64_t> values) {
    if (values.size() < 2)
        throw std::invalid_argument("median threshold needs at least 2 values");
    std::vector<int64_t> sorted(values.begin(), values.end());
    const size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    int64_t median2;
    if (sorted.size() % 2 == 1) {
        median2 = 2 * sorted[mid];
    } else {
        median2 = sorted[mid] + *std::max_element(sorted.begin(), sorted.begin() + mid);
    }
    BitString out;
    for (int64_t v : values) out.append(2 * v >= median2);
    return out;
}

std::vector<double> eve_track_reconciliation(
    const BitString& eve_bits, const BitString& initiator_bits,
    std::span<const std::pair<BitString, BitString>> parity_transcript) {
    if (eve_bits.size() != initiator_bits.size())
        throw std::invalid_argument(
            "eavesdropper and initiator strings disagree in length");

    BitString truth = initiator_bits;
    BitString estimate = eve_bits;
    std::vector<double> ber_per_iteration;
    ber_per_iteration.reserve(parity_transcript.size());

    for (const auto& [local, remote] : parity_transcript) {
        const size_t pairs = truth.size() / 2;
        if (local.size() != pairs || remote.size() != pairs)
            throw std::invalid_argument("parity transcript length mismatch");
        BitString next_truth, next_estimate;
        for (size_t i = 0; i < pairs; ++i) {
            if (local.bit(i) != remote.bit(i)) continue;
            next_truth.append(truth.bit(2 * i));
            next_estimate.append(estimate.bit(2 * i));
        }
        truth = std::move(next_truth);
        estimate = std::move(next_estimate);
        ber_per_iteration.push_back(
            truth.empty() ? 0.0
                          : static_cast<double>(estimate.hamming_distance(truth)) /
                                static_cast<double>(truth.size()));
    }
    return ber_per_iteration;
}

// ------------------------------------------------------------------
// Session plumbing
// ------------------------------------------------------------------

std::vector<RttSample> SimulatedRallySource::rally(uint32_t rounds) {
    world_ = simulate_rallies(topology_, rounds, drop_prob_, seed_);
    return side_ == Side::initiator ? world_.initiator : world_.responder;
}

EveGroundTruth compute_eve_ground_truth(const RallyWorld& world) {
    const DiscardSet union_discards =
        local_discards(world.initiator).united_with(local_discards(world.responder));
    const auto initiator_survivors = apply_discards(world.initiator, union_discards);
    const auto responder_survivors = apply_discards(world.responder, union_discards);
    if (initiator_survivors.size() < 2)
        throw std::invalid_argument("too few surviving rounds for extraction");

    const Extraction ex_initiator = extract_bits(initiator_survivors);
    const Extraction ex_responder = extract_bits(responder_survivors);
    const DiscardSet tie_union = ex_initiator.ties.united_with(ex_responder.ties);

    EveGroundTruth gt;
    gt.initiator_bits = remove_tied(ex_initiator, tie_union);
    gt.responder_bits = remove_tied(ex_responder, tie_union);
    for (uint32_t index : ex_initiator.encoded_indices)
        if (!tie_union.contains(index)) gt.surviving_rounds.push_back(index);

    // The eavesdropper mirrors the endpoints' procedure: threshold her
    // observations for every survivor of the (public) first discard
    // exchange, then drop the (public) tie union. Her own ties she can
    // only resolve arbitrarily; nobody discards rounds for her.
    std::vector<int64_t> eve_intervals;
    eve_intervals.reserve(initiator_survivors.size());
    for (const RttSample& s : initiator_survivors) {
        const EveObservation& obs = world.eve.at(s.index);
        if (!obs.valid)
            throw std::logic_error("surviving round lacks an eavesdropper observation");
        eve_intervals.push_back(obs.interval_ns);
    }
    const BitString eve_all = threshold_by_median(eve_intervals);
    for (size_t i = 0; i < initiator_survivors.size(); ++i)
        if (!tie_union.contains(initiator_survivors[i].index))
            gt.eve_bits.append(eve_all.bit(i));

    const size_t n = gt.initiator_bits.size();
    if (n > 0) {
        gt.eve_initial_ber =
            static_cast<double>(gt.eve_bits.hamming_distance(gt.initiator_bits)) / n;
        gt.channel_initial_ber =
            static_cast<double>(gt.responder_bits.hamming_distance(gt.initiator_bits)) / n;
    }
    return gt;
}

} // namespace ksrt::sim
