#ifndef KSRT_STATS_HPP
#define KSRT_STATS_HPP

#include <cstdint>

namespace ksrt::stats {

// Confidence interval on a binary-symmetric-channel error probability.
// Ends are clamped to [0, 0.5]: a BSC with e > 0.5 is just a relabeled
// channel, so estimates above one half carry no extra information.
struct BerInterval {
    double lo = 0.0;
    double hi = 0.5;

    bool contains(double e) const { return lo <= e && e <= hi; }
    double width() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
};

// Mismatch tally for one reconciliation iteration's parity exchange.
struct ParityStats {
    uint64_t mismatches = 0;
    uint64_t pairs = 0;
};

// Plain proportion interval in [0, 1], before any channel mapping.
struct ProportionInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// H(p) in bits; H(0) = H(1) = 0 by continuity. Domain error outside [0,1].
double binary_entropy(double p);

// 1 - H(e): capacity of a BSC in bits per use.
double bsc_capacity(double e);

// Maurer ceiling on the secret-key rate for the induced BSC with uniform
// inputs: S(X;Y||Z) <= I(X;Y) = 1 - H(e_ab).
double secrecy_upper_bound(double e_ab);

// Analytic bit error rate between the two endpoints' median-thresholded
// round-trip times when hop delays are i.i.d. with any zero-median
// symmetric distribution.
constexpr double theoretical_ber_symmetric() { return 1.0 / 3.0; }

// Kept-bit error probability after one bit-pair iteration on a BSC(e):
// pairs whose parities agree keep their first bit.
double pair_iteration_ber(double e);

// Inverse of pair_iteration_ber on [0, 0.5]; used to back-propagate
// later-iteration evidence to an initial-BER estimate.
double invert_pair_iteration_ber(double kept_ber);

// Probability that a pair's two parity bits disagree on a BSC(e).
double parity_mismatch_rate(double e);

// BSC error rate whose pair-parity mismatch rate is m. Inputs m > 0.5
// clamp to 0.5 (finite-sample mismatch rates can exceed the model range).
double invert_parity_mismatch(double m);

// Adjusted-count confidence interval for a binomial proportion,
// clamped to [0, 1]. trials must be >= 1; z defaults to 2 elsewhere.
ProportionInterval agresti_coull(uint64_t successes, uint64_t trials, double z);

// Interval on the underlying channel BER: Agresti-Coull on the parity
// mismatch proportion, both ends mapped through invert_parity_mismatch.
// The map is monotone on [0, 0.5], so end-mapping is exact propagation.
BerInterval ber_interval_from_parities(const ParityStats& s, double z);

// Piling-up: error probability of the XOR of k bits, each independently
// known with error eps.
double eve_parity_error(double eps, uint64_t k);

} // namespace ksrt::stats

#endif
