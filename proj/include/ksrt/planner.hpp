#ifndef KSRT_PLANNER_HPP
#define KSRT_PLANNER_HPP

#include <cstdint>
#include <optional>
#include <span>

#include "ksrt/stats.hpp"

namespace ksrt::planner {

struct PlannerConfig {
    // Assumed lower bound on the eavesdropper's per-bit error after
    // reconciliation; the security parameter that sizes privacy
    // amplification.
    double eve_ber_floor = 0.01;
    // Acceptable disagreement probability per final key bit.
    double final_key_ber_target = 1e-6;
    // Acceptable eavesdropper information per final key bit, in bits.
    double per_bit_leakage_budget = 1e-3;
    // Confidence width for all parity statistics.
    double z = 2.0;
    uint32_t iteration_cap = 32;
    uint32_t block_size_cap = 4096;

    void validate() const; // throws std::invalid_argument
};

struct IterationCount {
    uint32_t n = 0;
    bool capped = false; // true means the target was not reached within the cap
};

struct IterationInterval {
    IterationCount lo;
    IterationCount hi;
};

struct ReconciliationPlan {
    uint32_t total_iterations = 0;
    uint32_t pa_block_size = 1;
    double ir_target_ber = 0.0;
    // Maurer ceiling for the estimated channel, evaluated conservatively
    // at the interval's pessimistic end.
    double predicted_secrecy_bound = 0.0;
    double predicted_final_ber = 0.0;
    double predicted_eve_info_per_bit = 0.0;
};

// Smallest n with f^n(e) <= target, f the pair-iteration recursion.
// e = 0.5 is a fixed point, so the count is capped; `capped` flags a
// non-convergent input.
IterationCount iterations_needed(double e, double target, uint32_t cap = 32);

// iterations_needed applied to both interval ends; lo end first.
IterationInterval iteration_interval(const stats::BerInterval& ber, double target,
                                     uint32_t cap = 32);

// Commits once the interval has at most two possible values, taking the
// larger; otherwise more parity evidence is needed.
std::optional<uint32_t> commit_rule(const IterationInterval& interval);

// Smallest k >= 1 whose XOR compression leaves the eavesdropper at most
// `budget` bits of information per output bit. Throws when no k within
// the cap suffices (an eve floor near zero admits no finite block).
uint32_t choose_block_size(double eve_floor, double budget, uint32_t cap = 4096);

// Per-bit BER the reconciliation must reach so that XOR-compressing
// blocks of k bits still meets the final key target.
double compensate_ir_target(double final_target, uint32_t k);

// Pooled initial-BER interval: each iteration's parity statistics are
// inverted to a BER at that iteration's input and back-propagated
// through the recursion to iteration 0, then the intervals intersect.
stats::BerInterval pooled_initial_ber(std::span<const stats::ParityStats> transcript,
                                      double z);

// Full adaptive planning step from the public transcript so far.
// Returns nullopt while the iteration interval is still too wide to
// commit. Both endpoints run this on identical statistics and must
// produce identical plans.
std::optional<ReconciliationPlan> make_plan(std::span<const stats::ParityStats> transcript,
                                            const PlannerConfig& config);

// A protocol run is viable only if the assumed eavesdropper floor lies
// strictly below the estimated channel BER: otherwise the eavesdropper
// is presumed at least as well-informed as the peer and no amount of
// post-processing helps.
bool secrecy_viable(const stats::BerInterval& estimated_ab, double eve_floor);

} // namespace ksrt::planner

#endif
