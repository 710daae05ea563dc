#include "ksrt/rng.hpp"

#include <cmath>

namespace ksrt::rng {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t master, uint64_t stream_index) {
    uint64_t state = master ^ 0x5851f42d4c957f2dULL;
    (void)splitmix64(state);
    state ^= stream_index * 0xd1342543de82ef95ULL;
    return splitmix64(state);
}

double Stream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double Stream::laplace() {
    const double u = uniform_open() - 0.5;
    const double s = (u < 0.0) ? -1.0 : 1.0;
    return -s * std::log(1.0 - 2.0 * std::fabs(u));
}

double Stream::student_t(double dof) {
    // Ratio construction: N / sqrt(chi2(dof) / dof).
    const double z = normal();
    double chi2 = 0.0;
    const int whole = static_cast<int>(dof);
    for (int i = 0; i < whole; ++i) {
        const double n = normal();
        chi2 += n * n;
    }
    // Fractional degrees of freedom are not needed by any delay model;
    // whole is assumed exact.
    return z / std::sqrt(chi2 / dof);
}

} // namespace ksrt::rng
