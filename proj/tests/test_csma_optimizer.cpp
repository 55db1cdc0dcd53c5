#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "cogmac/aloha_analytic.hpp"
#include "cogmac/csma_optimizer.hpp"
#include "cogmac/rng.hpp"

using namespace cogmac;

namespace {

// grid over the probability simplex at the given resolution, minimizing f
double grid_min(int dims, int steps, const std::function<double(const std::vector<double>&)>& f) {
    std::vector<double> x(dims, 0.0);
    double best = std::numeric_limits<double>::infinity();
    std::function<void(int, int)> rec = [&](int d, int left) {
        if (d == dims - 1) {
            x[d] = double(left) / steps;
            best = std::min(best, f(x));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            x[d] = double(k) / steps;
            rec(d + 1, left - k);
        }
    };
    rec(0, steps);
    return best;
}

} // namespace

TEST_CASE("detector model validation") {
    CHECK_NOTHROW(DetectorModel(0.0, 1.0));
    CHECK_THROWS_AS(DetectorModel(-0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(DetectorModel(0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(DetectorModel(0.0, 1.0, 0.0), ValidationError);
    CHECK(DetectorModel::f1 == 0.0);
}

TEST_CASE("unutilized capacity") {
    const ChannelSet cs({1, 1}, {0.0, 0.0});
    // everything sensed: a full-band group loses nothing
    const SensingScheme whole = heuristic_multi(cs, enumerate_groups(2, 2));
    CHECK(unutilized_capacity(cs, whole, 1) == doctest::Approx(0.0));
    CHECK(unutilized_capacity(cs, whole, 7) == doctest::Approx(0.0));

    const SensingScheme uni(singleton_catalog(2), {0.5, 0.5});
    CHECK(unutilized_capacity(cs, uni, 2) == doctest::Approx(0.5).epsilon(1e-14));

    // vanishes as the population grows when every channel is covered
    CHECK(unutilized_capacity(cs, uni, 200) < 1e-50);
}

TEST_CASE("water filling hand instances") {
    {
        // residual rates (2,1), m=2 -> P=(2/3,1/3), nu=4/3
        const ChannelSet cs({2, 1}, {0.0, 0.0});
        const SolverReport r = optimal_single(cs, 2);
        CHECK(r.status == SolveStatus::optimal);
        CHECK(r.scheme.prob(0) == doctest::Approx(2.0 / 3).epsilon(1e-8));
        CHECK(r.scheme.prob(1) == doctest::Approx(1.0 / 3).epsilon(1e-8));
        CHECK(r.nu == doctest::Approx(4.0 / 3).epsilon(1e-8));
        CHECK(r.kkt_residual <= 1e-8);
        // fine grid search cannot beat it
        double best = 2.0;
        for (int k = 0; k <= 10000; ++k) {
            const double p0 = k * 1e-4;
            best = std::min(best, 2.0 * (1 - p0) * (1 - p0) + (p0) * (p0));
        }
        CHECK(r.objective <= best + 1e-8);
    }
    {
        // residual rates (3,3,1/3), m=3 -> P=(1/2,1/2,0), nu=2.25
        const ChannelSet cs({3, 3, 1.0 / 3}, {0.0, 0.0, 0.0});
        const SolverReport r = optimal_single(cs, 3);
        CHECK(r.scheme.prob(0) == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(r.scheme.prob(1) == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(r.scheme.prob(2) == doctest::Approx(0.0));
        CHECK(r.nu == doctest::Approx(2.25).epsilon(1e-8));
        CHECK(r.kkt_residual <= 1e-8);
    }
    {
        // symmetric channels spread uniformly, nu = m c (1-1/n)^(m-1)
        const int n = 5, m = 4;
        const ChannelSet cs(std::vector<double>(n, 2.0),
                            std::vector<double>(n, 0.3));
        const SolverReport r = optimal_single(cs, m);
        const double c = 2.0 * 0.7;
        for (int j = 0; j < n; ++j)
            CHECK(r.scheme.prob(j) == doctest::Approx(1.0 / n).epsilon(1e-9));
        CHECK(r.nu ==
              doctest::Approx(m * c * ipow(1.0 - 1.0 / n, m - 1)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(optimal_single(ChannelSet({1}, {0.5}), 1), ValidationError);
    CHECK(optimal_single(ChannelSet({1, 2}, {1.0, 1.0}), 3).status ==
          SolveStatus::infeasible);
}

TEST_CASE("water filling kkt on random instances") {
    SplitMix64 g(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + int(g.below(7));
        const int m = 2 + int(g.below(11));
        std::vector<double> w(n), t(n);
        for (int j = 0; j < n; ++j) {
            w[j] = 0.1 + 5.0 * g.next_double();
            t[j] = g.next_double();
        }
        const ChannelSet cs(w, t);
        const SolverReport r = optimal_single(cs, m);
        CHECK(r.kkt_residual <= 1e-8);
        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum += r.scheme.prob(j);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        // complementary slackness, explicitly
        for (int j = 0; j < n; ++j) {
            const double pj = r.scheme.prob(j);
            const double gj = m * cs.residual_rate(j) * ipow(1.0 - pj, m - 1);
            CHECK(pj * std::abs(r.nu - gj) <= 1e-8);
            CHECK(gj <= r.nu + 1e-8);
        }
    }
}

TEST_CASE("water filling equivariant under permutation") {
    const ChannelSet cs({2.0, 0.5, 1.5}, {0.1, 0.6, 0.3});
    const ChannelSet rot({0.5, 1.5, 2.0}, {0.6, 0.3, 0.1});
    const SolverReport a = optimal_single(cs, 4);
    const SolverReport b = optimal_single(rot, 4);
    CHECK(a.scheme.prob(0) == doctest::Approx(b.scheme.prob(2)).epsilon(1e-10));
    CHECK(a.scheme.prob(1) == doctest::Approx(b.scheme.prob(0)).epsilon(1e-10));
    CHECK(a.scheme.prob(2) == doctest::Approx(b.scheme.prob(1)).epsilon(1e-10));
}

TEST_CASE("projected gradient matches water filling on singletons") {
    SplitMix64 g(88);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + int(g.below(5));
        const int m = 2 + int(g.below(8));
        std::vector<double> w(n), t(n);
        for (int j = 0; j < n; ++j) {
            w[j] = 0.2 + 4.0 * g.next_double();
            t[j] = 0.9 * g.next_double();
        }
        const ChannelSet cs(w, t);
        const SolverReport wf = optimal_single(cs, m);
        const SolverReport pg = optimal_multi(cs, singleton_catalog(n), m);
        CHECK(pg.status == SolveStatus::optimal);
        CHECK(pg.objective == doctest::Approx(wf.objective).epsilon(1e-6));
        CHECK(pg.max_objective_increase <= 1e-12);
    }
}

TEST_CASE("projected gradient trivial full-band group") {
    const ChannelSet cs({1, 2}, {0.2, 0.4});
    const SolverReport r = optimal_multi(cs, enumerate_groups(2, 2), 3);
    CHECK(r.scheme.prob(0) == doctest::Approx(1.0));
    CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("projected gradient beats the 0.02 grid (n=4, s=2, m=3)") {
    SplitMix64 g(512);
    std::vector<double> w(4), t(4);
    for (int j = 0; j < 4; ++j) {
        w[j] = 0.3 + 3.0 * g.next_double();
        t[j] = g.next_double();
    }
    const ChannelSet cs(w, t);
    auto cat = enumerate_groups(4, 2);
    const int m = 3;
    const SolverReport r = optimal_multi(cs, cat, m);
    auto objective = [&](const std::vector<double>& p) {
        double f = 0.0;
        for (int i = 0; i < 4; ++i) {
            double cov = 0.0;
            for (int j : cat->groups_containing(i)) cov += p[j];
            f += cs.residual_rate(i) * ipow(1.0 - std::min(cov, 1.0), m);
        }
        return f;
    };
    const double grid_best = grid_min(6, 50, objective);
    CHECK(r.objective <= grid_best + 1e-4);
}

TEST_CASE("collision probability exact") {
    const ChannelSet cs({1}, {1.0});
    const SensingScheme whole(enumerate_groups(1, 1), {1.0});
    // alpha = 0 never transmits on busy
    CHECK(collision_probability_exact(cs, whole, 5, DetectorModel(0.0, 0.8), 0) ==
          doctest::Approx(0.0));
    // theta=1, cov=1, alpha f0 = 0.1, m=2 -> 0.01
    CHECK(collision_probability_exact(cs, whole, 2, DetectorModel(0.1, 0.8, 1.0),
                                      0) == doctest::Approx(0.01).epsilon(1e-14));
    // uncovered channel cannot collide
    const ChannelSet cs2({1, 1}, {1.0, 1.0});
    const SensingScheme skew(singleton_catalog(2), {1.0, 0.0});
    CHECK(collision_probability_exact(cs2, skew, 4, DetectorModel(0.5, 0.8), 1) ==
          doctest::Approx(0.0));
}

TEST_CASE("error-aware solver reduces to error-free at a perfect detector") {
    SplitMix64 g(606);
    const int n = 5, s = 2, m = 6;
    std::vector<double> w(n), t(n);
    for (int j = 0; j < n; ++j) {
        w[j] = 0.5 + 2.0 * g.next_double();
        t[j] = 0.1 + 0.3 * g.next_double();
    }
    const ChannelSet cs(w, t);
    auto cat = enumerate_groups(n, s);
    const SolverReport multi = optimal_multi(cs, cat, m);
    // the restricted collision constraint must already hold at that optimum
    const double xi = 0.1;
    for (int i = 0; i < n; ++i)
        CHECK(cs.theta(i) * ipow(1.0 - multi.scheme.coverage(i), m) < xi);
    const SolverReport err =
        optimal_with_errors(cs, cat, m, DetectorModel(0.0, 1.0), xi);
    CHECK(err.status == SolveStatus::optimal);
    CHECK(err.f0 == doctest::Approx(1.0).epsilon(1e-6));
    // objective double counts the never-sensed case at beta=1, f0=1
    CHECK(err.objective / 2.0 ==
          doctest::Approx(multi.objective).epsilon(1e-6));
}

TEST_CASE("error-aware solver constraint satisfaction") {
    SplitMix64 g(607);
    const int n = 7, s = 3, m = 6;
    const ChannelSet cs(std::vector<double>(n, 1.0),
                        {0.15, 0.17, 0.19, 0.21, 0.22, 0.23, 0.23});
    auto cat = enumerate_groups(n, s);
    const DetectorModel det(0.2, 0.8);
    const double xi = 0.1;
    const SolverReport r = optimal_with_errors(cs, cat, m, det, xi);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.f0 >= 1e-6);
    CHECK(r.f0 <= 1.0);
    double psum = 0.0;
    for (double p : r.scheme.probs()) {
        CHECK(p >= 0.0);
        psum += p;
    }
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-9));
    const DetectorModel at(det.alpha, det.beta, r.f0);
    for (int i = 0; i < n; ++i) {
        const double cov = r.scheme.coverage(i);
        // restricted constraint holds with slack
        CHECK(cs.theta(i) * ipow(1.0 - cov + det.alpha * r.f0, m) <= xi + 1e-8);
        // and it dominates the k-sum collision probability
        CHECK(collision_probability_exact(cs, r.scheme, m, at, i) <= xi + 1e-8);
        // convexity-region inequality
        CHECK(ipow(1.0 - (1.0 - det.beta) * cov, m) <=
              2.0 * (m - 1.0) * (1.0 - det.beta) * cov + 1e-8);
    }
}

TEST_CASE("error-aware solver with slack budget") {
    const int n = 4, s = 2, m = 5;
    const ChannelSet cs(std::vector<double>(n, 1.0), {0.2, 0.3, 0.25, 0.15});
    auto cat = enumerate_groups(n, s);
    const SolverReport r =
        optimal_with_errors(cs, cat, m, DetectorModel(0.3, 0.8), 1.0);
    CHECK(r.status == SolveStatus::optimal);
    // nothing pushes back on access: f0 runs to its upper bound
    CHECK(r.f0 == doctest::Approx(1.0).epsilon(1e-6));
    for (int i = 0; i < n; ++i)
        CHECK(cs.theta(i) * ipow(1.0 - r.scheme.coverage(i) + 0.3 * r.f0, m) <=
              1.0);
}

TEST_CASE("error-aware solver detects infeasible budgets") {
    const int n = 6, s = 1, m = 3;
    const ChannelSet cs(std::vector<double>(n, 1.0),
                        std::vector<double>(n, 0.9));
    // max-min coverage 1/6, theta 0.9: 0.9 (1 - 1/6)^3 = 0.52 >> xi
    const SolverReport r = optimal_with_errors(
        cs, enumerate_groups(n, s), m, DetectorModel(0.2, 0.8), 0.01);
    CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("exact objective mode") {
    // m large enough that the convexity-region inequality admits the
    // balanced coverage s/n
    const int n = 5, s = 2, m = 12;
    const ChannelSet cs(std::vector<double>(n, 1.0),
                        {0.1, 0.2, 0.15, 0.25, 0.3});
    auto cat = enumerate_groups(n, s);
    ErrorAwareOptions opt;
    opt.objective = ErrorObjective::exact;
    const DetectorModel det(0.1, 0.9);
    const SolverReport r = optimal_with_errors(cs, cat, m, det, 0.5, opt);
    CHECK(r.status == SolveStatus::optimal);
    // the reported objective is the exact overlooked capacity at the solution
    CHECK(r.objective ==
          doctest::Approx(unutilized_capacity_with_errors(cs, r.scheme, m,
                                                          det.beta, r.f0))
              .epsilon(1e-9));
}

TEST_CASE("loss percentage") {
    const ChannelSet cs({1, 1, 1}, {0.1, 0.5, 0.3});
    const int m = 6;
    const SolverReport opt = optimal_single(cs, m);
    // optimal against itself loses nothing
    CHECK(loss_percentage(cs, m, opt.scheme, opt) ==
          doctest::Approx(0.0).epsilon(1e-10));
    const SensingScheme heur = heuristic_single(cs);
    const double loss = loss_percentage(cs, m, heur, opt);
    CHECK(loss >= -1e-9);
    CHECK(loss < 100.0);
    // mismatched catalogs are rejected
    const SensingScheme multi = heuristic_multi(cs, enumerate_groups(3, 2));
    CHECK_THROWS_AS(loss_percentage(cs, m, multi, opt), ValidationError);
}
