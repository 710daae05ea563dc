#include "ksrt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksrt::stats {

namespace {

void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error(std::string(what) + " must lie in [0, 1]");
}

void require_half_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 0.5))
        throw std::domain_error(std::string(what) + " must lie in [0, 0.5]");
}

} // namespace

double binary_entropy(double p) {
    require_probability(p, "entropy argument");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double bsc_capacity(double e) {
    require_probability(e, "BSC error rate");
    return 1.0 - binary_entropy(e);
}

double secrecy_upper_bound(double e_ab) {
    require_half_probability(e_ab, "channel BER");
    return bsc_capacity(e_ab);
}

double pair_iteration_ber(double e) {
    require_half_probability(e, "BER");
    const double agree = e * e + (1.0 - e) * (1.0 - e); // >= 0.5 on [0, 0.5]
    return e * e / agree;
}

double invert_pair_iteration_ber(double kept_ber) {
    require_half_probability(kept_ber, "kept-bit BER");
    // y = e^2 / (e^2 + (1-e)^2)  =>  (1-e)/e = sqrt((1-y)/y)
    const double sy = std::sqrt(kept_ber);
    const double sq = std::sqrt(1.0 - kept_ber);
    return sy / (sy + sq);
}

double parity_mismatch_rate(double e) {
    require_half_probability(e, "BER");
    return 2.0 * e * (1.0 - e);
}

double invert_parity_mismatch(double m) {
    require_probability(m, "mismatch rate");
    const double disc = std::max(0.0, 1.0 - 2.0 * m);
    return (1.0 - std::sqrt(disc)) / 2.0;
}

ProportionInterval agresti_coull(uint64_t successes, uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("Agresti-Coull requires trials >= 1");
    if (successes > trials) throw std::invalid_argument("successes exceed trials");
    if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
    const double n_adj = static_cast<double>(trials) + z * z;
    const double p_adj = (static_cast<double>(successes) + z * z / 2.0) / n_adj;
    const double half_width = z * std::sqrt(p_adj * (1.0 - p_adj) / n_adj);
    return ProportionInterval{std::max(0.0, p_adj - half_width),
                              std::min(1.0, p_adj + half_width)};
}

BerInterval ber_interval_from_parities(const ParityStats& s, double z) {
    if (s.mismatches > s.pairs)
        throw std::invalid_argument("mismatches exceed pairs");
    const ProportionInterval m = agresti_coull(s.mismatches, s.pairs, z);
    BerInterval out;
    out.lo = invert_parity_mismatch(m.lo);
    out.hi = invert_parity_mismatch(m.hi);
    if (out.lo > out.hi) std::swap(out.lo, out.hi);
    return out;
}

double eve_parity_error(double eps, uint64_t k) {
    require_half_probability(eps, "per-bit error");
    if (k < 1) throw std::invalid_argument("block size must be >= 1");
    return (1.0 - std::pow(1.0 - 2.0 * eps, static_cast<double>(k))) / 2.0;
}

} // namespace ksrt::stats
