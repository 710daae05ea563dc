#include "ksrt/session.hpp"

#include <chrono>
#include <exception>
#include <sstream>
#include <thread>

#include "ksrt/errors.hpp"
#include "ksrt/reconcile.hpp"

namespace ksrt {

namespace {

using Clock = std::chrono::steady_clock;

wire::Frame expect_frame(MessageChannel& channel, wire::FrameType type,
                         const char* what) {
    const wire::Frame frame = channel.recv();
    if (frame.type != type)
        throw SessionAbort(AbortCause::desync,
                           std::string("expected ") + what + " frame");
    return frame;
}

DiscardSet exchange_discards(MessageChannel& channel, const DiscardSet& mine,
                             const char* what) {
    channel.send(wire::make_discard_set(mine));
    const wire::Frame frame = expect_frame(channel, wire::FrameType::discard_set, what);
    try {
        return mine.united_with(wire::parse_discard_set(frame));
    } catch (const std::invalid_argument& e) {
        throw SessionAbort(AbortCause::desync, e.what());
    }
}

std::string format_ber(const stats::BerInterval& interval) {
    std::ostringstream os;
    os << "[" << interval.lo << ", " << interval.hi << "]";
    return os.str();
}

SessionResult run_session_inner(RttSource& source, MessageChannel& channel,
                                const SessionConfig& config) {
    config.planner.validate();
    if (config.rounds < 100)
        throw std::invalid_argument("a session needs at least 100 rounds");

    const auto t_start = Clock::now();
    SessionResult result;
    SessionReport& report = result.report;
    report.rounds = config.rounds;

    // Measurement phase.
    const std::vector<RttSample> samples = source.rally(config.rounds);

    // Both sides must drop the union of the two discard sets so that
    // sample indices stay aligned.
    const DiscardSet mine = local_discards(samples);
    report.local_timeouts = mine.size();
    const DiscardSet union_discards = exchange_discards(channel, mine, "DISCARD_SET");
    report.union_discards = union_discards.size();

    const std::vector<RttSample> survivors = apply_discards(samples, union_discards);
    if (survivors.size() < 2)
        throw SessionAbort(AbortCause::insufficient_material,
                           "fewer than 2 rounds survived the discard exchange");

    // Extraction plus the second, tie-breaking discard exchange.
    const Extraction extraction = extract_bits(survivors);
    const DiscardSet tie_union =
        exchange_discards(channel, extraction.ties, "tie DISCARD_SET");
    report.ties = tie_union.size();

    BitString bits = remove_tied(extraction, tie_union);
    // Any abort from here on leaves no key material behind.
    struct Wiper {
        BitString& bits;
        ~Wiper() { bits.wipe(); }
    } wiper{bits};
    report.raw_bits = bits.size();

    if (config.observer && config.observer->on_aligned) {
        std::vector<uint32_t> surviving;
        surviving.reserve(extraction.encoded_indices.size());
        for (uint32_t index : extraction.encoded_indices)
            if (!tie_union.contains(index)) surviving.push_back(index);
        config.observer->on_aligned(bits, surviving);
    }

    // Adaptive reconciliation: run an iteration, re-plan, repeat until
    // the planner commits, then finish the committed count.
    ReconciliationTranscript transcript;
    transcript.initial_length = bits.size();
    transcript.final_length = bits.size();
    std::optional<planner::ReconciliationPlan> plan;
    uint32_t iteration = 0;

    while (!plan || iteration < plan->total_iterations) {
        if (!plan && iteration >= config.planner.iteration_cap)
            throw SessionAbort(AbortCause::iteration_cap,
                               "parity evidence never settled on an iteration count");
        if (!plan && bits.size() < 2)
            throw SessionAbort(AbortCause::insufficient_material,
                               "ran out of bits before the plan was committed");

        std::pair<BitString, BitString> exchanged;
        const IterationResult res = run_iteration(bits, channel, iteration, &exchanged);
        if (config.observer && config.observer->on_parity_exchange)
            config.observer->on_parity_exchange(exchanged.first, exchanged.second);

        transcript.record(res);
        report.iterations.push_back({res.parity, res.kept.size()});
        bits = res.kept;
        ++iteration;

        if (plan) continue;

        report.estimated_ber =
            planner::pooled_initial_ber(transcript.iterations, config.planner.z);
        if (!planner::secrecy_viable(report.estimated_ber, config.planner.eve_ber_floor))
            throw SessionAbort(
                AbortCause::secrecy_impossible,
                "assumed eavesdropper BER floor " +
                    std::to_string(config.planner.eve_ber_floor) +
                    " is not below the estimated channel BER " +
                    format_ber(report.estimated_ber));

        const auto candidate = planner::make_plan(transcript.iterations, config.planner);
        if (candidate) {
            // Cross-check the committed plan bit-for-bit with the peer.
            const wire::PlanCommit mine_commit{candidate->total_iterations,
                                               candidate->pa_block_size};
            channel.send(wire::make_plan_commit(mine_commit));
            const wire::Frame frame =
                expect_frame(channel, wire::FrameType::plan_commit, "PLAN_COMMIT");
            const wire::PlanCommit theirs = wire::parse_plan_commit(frame);
            if (theirs != mine_commit)
                throw SessionAbort(
                    AbortCause::plan_mismatch,
                    "peer committed to " + std::to_string(theirs.total_iterations) +
                        " iterations / block " + std::to_string(theirs.pa_block_size) +
                        ", we committed to " + std::to_string(mine_commit.total_iterations) +
                        " / " + std::to_string(mine_commit.pa_block_size));
            plan = candidate;
        }
    }

    // The reported estimate is the one the committed plan was built
    // from; evidence gathered after commitment no longer changes it.
    report.plan = *plan;
    report.secrecy_upper_bound = stats::secrecy_upper_bound(report.estimated_ber.hi);

    if (bits.size() < plan->pa_block_size) {
        const size_t have = bits.size();
        bits.wipe();
        throw SessionAbort(AbortCause::insufficient_material,
                           "too few reconciled bits (" + std::to_string(have) +
                               ") for one privacy-amplification block of " +
                               std::to_string(plan->pa_block_size));
    }

    // Privacy amplification and key confirmation.
    result.key = finalize_key(bits, plan->pa_block_size, config.session_id);
    bits.wipe();

    channel.send(wire::make_key_digest(result.key.digest));
    const wire::Frame frame =
        expect_frame(channel, wire::FrameType::key_digest, "KEY_DIGEST");
    const auto remote_digest = wire::parse_key_digest(frame);
    if (!verify_key(result.key, remote_digest)) {
        result.key.destroy();
        throw SessionAbort(AbortCause::digest_mismatch,
                           "final keys disagree; session keys destroyed");
    }

    report.final_key_bits = result.key.key.size();
    report.elapsed_seconds =
        std::chrono::duration<double>(Clock::now() - t_start).count();
    if (report.elapsed_seconds > 0.0)
        report.key_rate_bits_per_minute =
            static_cast<double>(report.final_key_bits) * 60.0 / report.elapsed_seconds;
    return result;
}

} // namespace

SessionResult run_keygen_session(RttSource& source, MessageChannel& channel,
                                 const SessionConfig& config) {
    try {
        SessionResult result = run_session_inner(source, channel, config);
        return result;
    } catch (...) {
        channel.close();
        throw;
    }
}

void require_eve_floor_plausible(const sim::EveGroundTruth& gt, double eve_ber_floor) {
    if (gt.eve_initial_ber < eve_ber_floor)
        throw SessionAbort(
            AbortCause::secrecy_impossible,
            "simulated eavesdropper already achieves BER " +
                std::to_string(gt.eve_initial_ber) + " before reconciliation, below the " +
                "assumed floor of " + std::to_string(eve_ber_floor));
}

SimulatedSession run_simulated_session(const sim::ChainTopology& topology,
                                       const SessionConfig& config, uint64_t seed,
                                       double drop_prob) {
    SimulatedSession out;

    // The ground truth is available before any protocol message flows;
    // a floor the topology visibly violates is refused up front.
    {
        const sim::RallyWorld world =
            sim::simulate_rallies(topology, config.rounds, drop_prob, seed);
        out.ground_truth = sim::compute_eve_ground_truth(world);
        require_eve_floor_plausible(out.ground_truth, config.planner.eve_ber_floor);
    }

    sim::SimulatedRallySource initiator_source(
        topology, seed, sim::SimulatedRallySource::Side::initiator, drop_prob);
    sim::SimulatedRallySource responder_source(
        topology, seed, sim::SimulatedRallySource::Side::responder, drop_prob);

    auto [initiator_channel, responder_channel] = make_channel_pair();

    std::vector<std::pair<BitString, BitString>> parity_transcript;
    SessionObserver observer;
    observer.on_aligned = [&](const BitString& aligned,
                              const std::vector<uint32_t>& surviving) {
        // The ground truth above re-derives the discard and tie logic;
        // it must agree with what the engine actually produced.
        if (aligned != out.ground_truth.initiator_bits ||
            surviving != out.ground_truth.surviving_rounds)
            throw std::logic_error(
                "ground-truth reconstruction diverged from the session engine");
    };
    observer.on_parity_exchange = [&](const BitString& local, const BitString& remote) {
        parity_transcript.emplace_back(local, remote);
    };

    SessionConfig initiator_config = config;
    initiator_config.observer = &observer;
    SessionConfig responder_config = config;
    responder_config.observer = nullptr;

    std::exception_ptr responder_error;
    SessionResult responder_result;
    std::thread responder_thread([&] {
        try {
            responder_result =
                run_keygen_session(responder_source, *responder_channel, responder_config);
        } catch (...) {
            responder_error = std::current_exception();
        }
    });

    std::exception_ptr initiator_error;
    try {
        out.initiator =
            run_keygen_session(initiator_source, *initiator_channel, initiator_config);
    } catch (...) {
        initiator_error = std::current_exception();
    }
    responder_thread.join();

    // The initiator's abort cause is the canonical one; a responder-side
    // failure surfaces only if the initiator survived it.
    if (initiator_error) std::rethrow_exception(initiator_error);
    if (responder_error) std::rethrow_exception(responder_error);
    out.responder = std::move(responder_result);

    out.ab_ber_by_state.push_back(out.ground_truth.channel_initial_ber);
    out.eve_ber_by_state.push_back(out.ground_truth.eve_initial_ber);
    const auto ab_track = sim::eve_track_reconciliation(
        out.ground_truth.responder_bits, out.ground_truth.initiator_bits, parity_transcript);
    const auto eve_track = sim::eve_track_reconciliation(
        out.ground_truth.eve_bits, out.ground_truth.initiator_bits, parity_transcript);
    out.ab_ber_by_state.insert(out.ab_ber_by_state.end(), ab_track.begin(), ab_track.end());
    out.eve_ber_by_state.insert(out.eve_ber_by_state.end(), eve_track.begin(),
                                eve_track.end());
    return out;
}

} // namespace ksrt
