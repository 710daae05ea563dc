#ifndef KSRT_RNG_HPP
#define KSRT_RNG_HPP

#include <cstdint>
#include <random>

namespace ksrt::rng {

// SplitMix64 step; used to derive well-separated child seeds from one
// master seed so that chunked Monte Carlo runs are reproducible for any
// thread count.
uint64_t splitmix64(uint64_t& state);

uint64_t derive_seed(uint64_t master, uint64_t stream_index);

// A self-contained random stream. Variate transforms are hand-rolled on
// top of mt19937_64 so that a given seed produces the same sequence on
// every platform (std::normal_distribution et al. are not portable).
class Stream {
public:
    explicit Stream(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1); never returns an exact endpoint.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller; the spare variate is cached.
    double normal();

    // Location 0, scale 1 for all of these.
    double laplace();
    double student_t(double dof);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ksrt::rng

#endif
