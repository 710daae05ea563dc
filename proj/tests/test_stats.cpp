#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ksrt/stats.hpp"
#include "support/oracles.hpp"

using namespace ksrt;
using namespace ksrt::stats;

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(1.0 / 3.0) == doctest::Approx(0.9182958340544896).epsilon(1e-9));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.1), std::domain_error);

    for (double p = 0.0; p <= 0.5; p += 0.01)
        CHECK(binary_entropy(p) == doctest::Approx(binary_entropy(1.0 - p)).epsilon(1e-12));
}

TEST_CASE("BSC capacity") {
    CHECK(bsc_capacity(1.0 / 3.0) == doctest::Approx(0.0817).epsilon(0.0013));
    CHECK(bsc_capacity(1.0 / 3.0) == doctest::Approx(0.08170416594551).epsilon(1e-9));
    // Two-decimal rounding lands on 0.08 bits per measurement.
    CHECK(std::round(bsc_capacity(1.0 / 3.0) * 100.0) / 100.0 == 0.08);
    CHECK(bsc_capacity(0.0) == doctest::Approx(1.0));
    CHECK(bsc_capacity(0.5) == doctest::Approx(0.0).epsilon(1e-12));

    // Strictly decreasing on [0, 0.5], symmetric around 0.5.
    double prev = bsc_capacity(0.0);
    for (double e = 0.01; e <= 0.5; e += 0.01) {
        const double c = bsc_capacity(e);
        CHECK(c < prev);
        CHECK(c == doctest::Approx(bsc_capacity(1.0 - e)).epsilon(1e-12));
        prev = c;
    }
}

TEST_CASE("secrecy upper bound") {
    CHECK(secrecy_upper_bound(1.0 / 3.0) == doctest::Approx(0.0817).epsilon(0.0013));
    CHECK(secrecy_upper_bound(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(secrecy_upper_bound(0.11) == doctest::Approx(0.500084041835472).epsilon(1e-9));
    CHECK(secrecy_upper_bound(0.11) == doctest::Approx(0.5002).epsilon(1e-3));
    CHECK_THROWS_AS(secrecy_upper_bound(0.6), std::domain_error);
}

TEST_CASE("pair iteration recursion against enumeration") {
    CHECK(pair_iteration_ber(1.0 / 3.0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(pair_iteration_ber(0.0) == 0.0);
    CHECK(pair_iteration_ber(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(pair_iteration_ber(0.6), std::domain_error);

    CHECK(parity_mismatch_rate(1.0 / 3.0) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(parity_mismatch_rate(0.0) == 0.0);
    CHECK(parity_mismatch_rate(0.5) == doctest::Approx(0.5).epsilon(1e-12));

    for (double e = 0.0; e <= 0.5; e += 0.025) {
        const auto [kept, mismatch] = oracles::pair_iteration_by_enumeration(e);
        CHECK(pair_iteration_ber(e) == doctest::Approx(kept).epsilon(1e-12));
        CHECK(parity_mismatch_rate(e) == doctest::Approx(mismatch).epsilon(1e-12));
        // The iteration never makes the channel worse.
        CHECK(pair_iteration_ber(e) <= e + 1e-15);
        if (e > 0.0 && e < 0.5) CHECK(pair_iteration_ber(e) < e);
    }
}

TEST_CASE("mismatch inversion") {
    CHECK(invert_parity_mismatch(4.0 / 9.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(invert_parity_mismatch(0.0) == 0.0);
    CHECK(invert_parity_mismatch(0.6) == doctest::Approx(0.5));

    for (double e = 0.0; e <= 0.5; e += 0.005)
        CHECK(invert_parity_mismatch(parity_mismatch_rate(e)) ==
              doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("pair iteration inversion") {
    for (double e = 0.0; e <= 0.5; e += 0.005)
        CHECK(invert_pair_iteration_ber(pair_iteration_ber(e)) ==
              doctest::Approx(e).epsilon(1e-10));
}

TEST_CASE("Agresti-Coull interval") {
    const auto itv = agresti_coull(50, 100, 2.0);
    CHECK(itv.lo == doctest::Approx(0.4019).epsilon(1e-3));
    CHECK(itv.hi == doctest::Approx(0.5981).epsilon(1e-3));

    CHECK(agresti_coull(0, 100, 2.0).lo == 0.0);
    CHECK(agresti_coull(100, 100, 2.0).hi == 1.0);
    CHECK_THROWS(agresti_coull(1, 0, 2.0));
    CHECK_THROWS(agresti_coull(5, 4, 2.0));

    // Width shrinks with the trial count at a fixed success ratio.
    double prev_width = 1.0;
    for (uint64_t n = 100; n <= 100000; n *= 10) {
        const auto i = agresti_coull(n / 3, n, 2.0);
        CHECK(i.hi - i.lo < prev_width);
        prev_width = i.hi - i.lo;
    }
}

TEST_CASE("Agresti-Coull coverage by simulation") {
    // 10,000 binomial(100, 1/3) draws; the 2-sigma interval must cover
    // the truth at least 93% of the time.
    const double coverage = oracles::agresti_coull_coverage(1.0 / 3.0, 100, 2.0, 10000, 11);
    CHECK(coverage >= 0.93);
}

TEST_CASE("channel BER interval from parity statistics") {
    const auto itv = ber_interval_from_parities({444, 1000}, 2.0);
    CHECK(itv.lo < 1.0 / 3.0);
    CHECK(itv.hi > 1.0 / 3.0);
    CHECK(itv.lo == doctest::Approx(0.2912661630633441).epsilon(1e-9));
    CHECK(itv.hi == doctest::Approx(0.38951435501396386).epsilon(1e-9));

    CHECK(ber_interval_from_parities({0, 1000}, 2.0).lo == 0.0);

    // Ends are monotone in the mismatch count at fixed pairs.
    double prev_lo = -1.0, prev_hi = -1.0;
    for (uint64_t m = 0; m <= 500; m += 25) {
        const auto i = ber_interval_from_parities({m, 1000}, 2.0);
        CHECK(i.lo >= prev_lo);
        CHECK(i.hi >= prev_hi);
        CHECK(i.lo <= i.hi);
        prev_lo = i.lo;
        prev_hi = i.hi;
    }
}

TEST_CASE("piling-up error of a XOR block") {
    CHECK(eve_parity_error(0.02, 4) == doctest::Approx(0.0753267).epsilon(1e-6));
    CHECK(eve_parity_error(0.02, 4) ==
          doctest::Approx(oracles::xor_error_by_enumeration(0.02, 4)).epsilon(1e-12));
    for (uint64_t k : {1, 2, 3, 7}) {
        CHECK(eve_parity_error(0.0, k) == 0.0);
        CHECK(eve_parity_error(0.5, k) == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(eve_parity_error(0.1, 1) == doctest::Approx(0.1).epsilon(1e-12));

    // Non-decreasing in k.
    for (double eps : {0.01, 0.1, 0.3}) {
        double prev = 0.0;
        for (uint64_t k = 1; k <= 64; ++k) {
            const double p = eve_parity_error(eps, k);
            CHECK(p >= prev);
            prev = p;
        }
    }

    // Composition: a block of a+b bits behaves like the XOR of two
    // independent blocks. Checked against enumeration up to k = 6.
    for (unsigned a = 1; a <= 3; ++a) {
        for (unsigned b = 1; b <= 3; ++b) {
            const double eps = 0.07;
            const double pa = oracles::xor_error_by_enumeration(eps, a);
            const double pb = oracles::xor_error_by_enumeration(eps, b);
            const double composed = pa * (1.0 - pb) + pb * (1.0 - pa);
            CHECK(eve_parity_error(eps, a + b) == doctest::Approx(composed).epsilon(1e-12));
        }
    }
}

TEST_CASE("theoretical BER constant") {
    CHECK(theoretical_ber_symmetric() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}
