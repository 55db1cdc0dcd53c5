#include <doctest.h>

#include "cogmac/channel_model.hpp"
#include "cogmac/rng.hpp"

using namespace cogmac;

TEST_CASE("channel set validation") {
    CHECK_NOTHROW(ChannelSet({1.0}, {0.0}, 1.0));
    CHECK_THROWS_AS(ChannelSet({}, {}, 1.0), ValidationError);
    CHECK_THROWS_AS(ChannelSet({1.0, 1.0}, {0.5}, 1.0), ValidationError);
    CHECK_THROWS_AS(ChannelSet({1.0, -2.0}, {0.5, 0.5}, 1.0), ValidationError);
    CHECK_THROWS_AS(ChannelSet({1.0}, {0.5}, 0.0), ValidationError);
    // offending index is named
    try {
        ChannelSet({1.0, 1.0}, {0.5, 1.5}, 1.0);
        FAIL("expected throw");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("index 1") != std::string::npos);
    }
}

TEST_CASE("rates and summary") {
    const ChannelSet cs({2.0, 1.0}, {0.2, 0.8}, 3.0);
    CHECK(cs.rate(0) == doctest::Approx(6.0));
    CHECK(cs.rate(1) == doctest::Approx(3.0));

    const ChannelSet unit({2.0, 1.0}, {0.2, 0.8});
    const CapacitySummary s = summarize(unit);
    CHECK(s.c_primary == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(s.c_max == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s.rho == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(s.c_residual == doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("summary edge utilizations") {
    const CapacitySummary full = summarize(ChannelSet({1, 2}, {1.0, 1.0}));
    CHECK(full.rho == doctest::Approx(1.0));
    CHECK(full.c_residual == doctest::Approx(0.0));
    const CapacitySummary idle = summarize(ChannelSet({1, 2}, {0.0, 0.0}));
    CHECK(idle.rho == doctest::Approx(0.0));
    CHECK(idle.c_residual == doctest::Approx(idle.c_max));
}

TEST_CASE("summary invariants on random sets") {
    SplitMix64 g(123);
    for (int trial = 0; trial < 200; ++trial, g.next()) {
        const int n = 1 + int(g.below(8));
        std::vector<double> w(n), t(n);
        for (int j = 0; j < n; ++j) {
            w[j] = 0.1 + 5.0 * g.next_double();
            t[j] = g.next_double();
        }
        const double a = 0.5 + 3.0 * g.next_double();
        const ChannelSet cs(w, t, a);
        const CapacitySummary s = summarize(cs);

        CHECK(std::abs(s.c_primary + s.c_residual - s.c_max) <=
              1e-12 * s.c_max);
        double norm_sum = 0.0;
        for (double x : s.normalized) norm_sum += x;
        CHECK(norm_sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.rho >= 0.0);
        CHECK(s.rho <= 1.0);
        // rho is the normalized-rate weighted mean of the thetas
        double mean = 0.0;
        for (int j = 0; j < n; ++j) mean += s.normalized[j] * t[j];
        CHECK(s.rho == doctest::Approx(mean).epsilon(1e-12));

        // scaling widths scales capacities, leaves rho and normalized alone
        std::vector<double> w2(w);
        for (double& x : w2) x *= 7.5;
        const CapacitySummary s2 = summarize(ChannelSet(w2, t, a));
        CHECK(s2.c_max == doctest::Approx(7.5 * s.c_max).epsilon(1e-12));
        CHECK(s2.c_primary == doctest::Approx(7.5 * s.c_primary).epsilon(1e-12));
        CHECK(s2.rho == doctest::Approx(s.rho).epsilon(1e-12));
        for (int j = 0; j < n; ++j)
            CHECK(s2.normalized[j] ==
                  doctest::Approx(s.normalized[j]).epsilon(1e-12));
    }
}
