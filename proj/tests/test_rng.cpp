#include <doctest.h>

#include <cmath>

#include "ksrt/rng.hpp"

using namespace ksrt::rng;

TEST_CASE("streams are deterministic in the seed") {
    Stream a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const uint64_t va = a.next_u64();
        all_equal &= va == b.next_u64();
        any_diff |= va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("derived seeds separate streams") {
    const uint64_t s0 = derive_seed(7, 0);
    const uint64_t s1 = derive_seed(7, 1);
    const uint64_t t0 = derive_seed(8, 0);
    CHECK(s0 != s1);
    CHECK(s0 != t0);
    CHECK(derive_seed(7, 0) == s0);
}

TEST_CASE("uniform stays inside the unit interval") {
    Stream s(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform_open();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("variate moments are roughly right") {
    Stream s(99);
    const int n = 200000;

    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::fabs(sum / n) < 0.01);
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));

    // Laplace(1): mean 0, variance 2.
    sum = sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.laplace();
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::fabs(sum / n) < 0.02);
    CHECK(sum2 / n == doctest::Approx(2.0).epsilon(0.05));

    // Student-t(3): symmetric around 0; median near 0.
    int below = 0;
    for (int i = 0; i < n; ++i) below += s.student_t(3.0) < 0.0;
    CHECK(std::fabs(below / static_cast<double>(n) - 0.5) < 0.01);
}
