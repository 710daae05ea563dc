#include "ksrt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksrt::planner {

using stats::BerInterval;
using stats::ParityStats;

void PlannerConfig::validate() const {
    auto open_half = [](double p, const char* what) {
        if (!(p > 0.0 && p < 0.5))
            throw std::invalid_argument(std::string(what) + " must lie in (0, 0.5)");
    };
    open_half(eve_ber_floor, "eve BER floor");
    open_half(final_key_ber_target, "final key BER target");
    if (!(per_bit_leakage_budget > 0.0))
        throw std::invalid_argument("leakage budget must be positive");
    if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
    if (iteration_cap == 0 || block_size_cap == 0)
        throw std::invalid_argument("caps must be at least 1");
}

IterationCount iterations_needed(double e, double target, uint32_t cap) {
    if (!(e >= 0.0 && e <= 0.5))
        throw std::domain_error("BER must lie in [0, 0.5]");
    if (!(target > 0.0 && target < 0.5))
        throw std::domain_error("target BER must lie in (0, 0.5)");
    IterationCount out;
    double current = e;
    while (current > target) {
        if (out.n == cap) {
            out.capped = true;
            return out;
        }
        current = stats::pair_iteration_ber(current);
        ++out.n;
    }
    return out;
}

IterationInterval iteration_interval(const BerInterval& ber, double target,
                                     uint32_t cap) {
    return IterationInterval{iterations_needed(ber.lo, target, cap),
                             iterations_needed(ber.hi, target, cap)};
}

std::optional<uint32_t> commit_rule(const IterationInterval& interval) {
    if (interval.hi.capped) return std::nullopt;
    if (interval.hi.n - interval.lo.n <= 1) return interval.hi.n;
    return std::nullopt;
}

uint32_t choose_block_size(double eve_floor, double budget, uint32_t cap) {
    if (!(eve_floor > 0.0 && eve_floor <= 0.5))
        throw std::domain_error("eve floor must lie in (0, 0.5]");
    if (!(budget > 0.0)) throw std::domain_error("budget must be positive");
    for (uint32_t k = 1; k <= cap; ++k) {
        const double eve_info = stats::bsc_capacity(stats::eve_parity_error(eve_floor, k));
        if (eve_info <= budget) return k;
    }
    throw std::runtime_error(
        "no privacy-amplification block within the cap discards enough "
        "eavesdropper information; the assumed eve floor is too small");
}

double compensate_ir_target(double final_target, uint32_t k) {
    if (!(final_target > 0.0 && final_target < 0.5))
        throw std::domain_error("final target must lie in (0, 0.5)");
    if (k < 1) throw std::domain_error("block size must be >= 1");
    // Inverse of the piling-up map at block size k.
    return (1.0 - std::pow(1.0 - 2.0 * final_target, 1.0 / static_cast<double>(k))) / 2.0;
}

BerInterval pooled_initial_ber(std::span<const ParityStats> transcript, double z) {
    if (transcript.empty())
        throw std::invalid_argument("planner needs at least one iteration's statistics");
    BerInterval pooled{0.0, 0.5};
    for (size_t i = 0; i < transcript.size(); ++i) {
        if (transcript[i].pairs == 0) continue;
        BerInterval at_input = stats::ber_interval_from_parities(transcript[i], z);
        for (size_t back = 0; back < i; ++back) {
            at_input.lo = stats::invert_pair_iteration_ber(at_input.lo);
            at_input.hi = stats::invert_pair_iteration_ber(at_input.hi);
        }
        pooled.lo = std::max(pooled.lo, at_input.lo);
        pooled.hi = std::min(pooled.hi, at_input.hi);
    }
    // An empty intersection is possible when the i.i.d. recursion is
    // only an approximation of the real channel (the rallied chain
    // correlates adjacent samples slightly); collapse to the more
    // pessimistic of the two boundary points.
    if (pooled.lo > pooled.hi) pooled.hi = pooled.lo;
    return pooled;
}

std::optional<ReconciliationPlan> make_plan(std::span<const ParityStats> transcript,
                                            const PlannerConfig& config) {
    config.validate();
    const BerInterval initial = pooled_initial_ber(transcript, config.z);

    ReconciliationPlan plan;
    plan.pa_block_size = choose_block_size(config.eve_ber_floor,
                                           config.per_bit_leakage_budget,
                                           config.block_size_cap);
    plan.ir_target_ber = compensate_ir_target(config.final_key_ber_target,
                                              plan.pa_block_size);

    const IterationInterval needed =
        iteration_interval(initial, plan.ir_target_ber, config.iteration_cap);
    const uint32_t done = static_cast<uint32_t>(transcript.size());

    std::optional<uint32_t> total;
    if (!needed.hi.capped && needed.hi.n <= done) {
        // Even the pessimistic end is already satisfied by the
        // iterations that have run; no need to wait for the interval to
        // narrow.
        total = done;
    } else {
        // commit_rule can only return hi.n > done here.
        total = commit_rule(needed);
    }
    if (!total) return std::nullopt;

    plan.total_iterations = *total;
    plan.predicted_secrecy_bound = stats::secrecy_upper_bound(initial.hi);
    double final_ber = initial.hi;
    for (uint32_t i = 0; i < plan.total_iterations; ++i)
        final_ber = stats::pair_iteration_ber(final_ber);
    plan.predicted_final_ber =
        stats::eve_parity_error(final_ber, plan.pa_block_size);
    plan.predicted_eve_info_per_bit = stats::bsc_capacity(
        stats::eve_parity_error(config.eve_ber_floor, plan.pa_block_size));
    return plan;
}

bool secrecy_viable(const BerInterval& estimated_ab, double eve_floor) {
    return eve_floor < estimated_ab.lo;
}

} // namespace ksrt::planner
