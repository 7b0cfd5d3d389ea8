#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "vacq/montecarlo.hpp"

using namespace vacq;

namespace {

QueueConfig make_cfg(double T, double K, DistributionSpec s, DistributionSpec v,
                     Discipline d = Discipline::reneging) {
    QueueConfig c;
    c.T = T;
    c.K = K;
    c.service = std::move(s);
    c.vacation = std::move(v);
    c.discipline = d;
    return c;
}

QueueConfig cfg_s5(Discipline d = Discipline::reneging) {
    return make_cfg(2, 3, DistributionSpec::deterministic(0.5), DistributionSpec::exponential(1),
                    d);
}

QueueConfig cfg_s6(Discipline d = Discipline::reneging) {
    return make_cfg(1, 2, DistributionSpec::exponential(2), DistributionSpec::exponential(1), d);
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("summary counts are internally consistent") {
    auto ren = estimate_stationary(cfg_s5(), 20000, 2000, 4, 7, 128);
    CHECK(ren.stable);
    CHECK(ren.W0_hat.value == ren.empirical.atom0);
    CHECK(ren.BK_hat.value == ren.empirical.boundary_mass);
    CHECK(ren.empirical.x_max == 3.0);
    CHECK(ren.empirical.boundary_kind == BoundaryKind::deadline_atom);
    CHECK(ren.empirical.normalization_error() < 1e-8);
    CHECK(ren.n_customers == 20000);
    CHECK(ren.n_replications == 4);
    CHECK(ren.burn_in == 2000);

    auto blk = estimate_stationary(cfg_s5(Discipline::balking), 20000, 2000, 4, 7, 128);
    CHECK(blk.W0_hat.value == blk.empirical.atom0);
    CHECK(blk.empirical.boundary_kind == BoundaryKind::truncation_tail);
    // the deadline sits on a grid node, so the blocked share is a bin count
    CHECK(std::abs(blk.BK_hat.value - (1.0 - blk.empirical.cdf_at(3.0))) < 1e-12);
    CHECK(blk.empirical.normalization_error() < 1e-8);
}

TEST_CASE("standard errors shrink with replications") {
    auto a = estimate_stationary(cfg_s6(), 40000, 4000, 4, 11, 128);
    auto b = estimate_stationary(cfg_s6(), 40000, 4000, 16, 11, 128);
    double ratio = a.BK_hat.se / b.BK_hat.se;
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.6);
    CHECK(a.W0_hat.se > 0.0);
}

TEST_CASE("halving the path length stays within joint error bars") {
    auto a = estimate_stationary(cfg_s6(), 50000, 5000, 8, 13, 128);
    auto b = estimate_stationary(cfg_s6(), 100000, 5000, 8, 14, 128);
    CHECK(std::abs(a.BK_hat.value - b.BK_hat.value) <= 3.0 * (a.BK_hat.se + b.BK_hat.se));
    CHECK(std::abs(a.W0_hat.value - b.W0_hat.value) <= 3.0 * (a.W0_hat.se + b.W0_hat.se));
}

TEST_CASE("estimates land on the solved fixed point, not the candidate law") {
    auto s = estimate_stationary(cfg_s5(), 200000, 20000, 8, 17, 256);
    CHECK(std::abs(s.W0_hat.value - 0.626181697306) <= 4.0 * s.W0_hat.se);
    CHECK(std::abs(s.BK_hat.value - 0.024712970660) <= 4.0 * s.BK_hat.se);
    // the candidate closed form puts 0.7473 at zero; the chain disagrees
    CHECK(std::abs(s.W0_hat.value - 0.74731954506539161) > 10.0 * s.W0_hat.se);
}

TEST_CASE("transient tail estimates") {
    auto blk = cfg_s5(Discipline::balking);
    // exact first-step tail: P(w_1 > 0) = P(sigma + v > T) = e^{-1.5}
    auto t1 = estimate_transient_tail(blk, 1, 0.0, 40000, 19);
    CHECK(t1.n_paths == 40000);
    CHECK(std::abs(t1.probability - std::exp(-1.5)) <= 3.0 * t1.se);
    // reneging sees the same event at the same position
    auto r1 = estimate_transient_tail(cfg_s5(), 1, 0.0, 40000, 19);
    CHECK(r1.probability == t1.probability);

    // exact second-step tail: P(w_2 > 1) = e^{-2.5} + 2.5 e^{-4}
    auto t2 = estimate_transient_tail(blk, 2, 1.0, 60000, 23);
    CHECK(std::abs(t2.probability - 0.1278740958457342459) <= 3.0 * t2.se);

    auto far = estimate_transient_tail(blk, 1, 50.0, 2000, 29);
    CHECK(far.probability == 0.0);

    // service 3 > T = 2 forces every early wait past 1
    auto grow = make_cfg(2, 100, DistributionSpec::deterministic(3),
                         DistributionSpec::deterministic(0.5), Discipline::balking);
    auto g = estimate_transient_tail(grow, 3, 1.0, 500, 31);
    CHECK(g.probability == 1.0);
}

TEST_CASE("same seed reproduces bitwise, different seeds differ") {
    auto a = estimate_stationary(cfg_s6(), 20000, 2000, 4, 41, 128);
    auto b = estimate_stationary(cfg_s6(), 20000, 2000, 4, 41, 128);
    CHECK(a.W0_hat.value == b.W0_hat.value);
    CHECK(a.BK_hat.value == b.BK_hat.value);
    CHECK(a.mean_wait.value == b.mean_wait.value);
    CHECK(a.empirical.cdf == b.empirical.cdf);
    auto c = estimate_stationary(cfg_s6(), 20000, 2000, 4, 42, 128);
    CHECK(a.BK_hat.value != c.BK_hat.value);
}

TEST_CASE("thread count does not change the estimate") {
    auto a = estimate_stationary(cfg_s6(Discipline::balking), 30000, 3000, 8, 43, 128, 1);
    auto b = estimate_stationary(cfg_s6(Discipline::balking), 30000, 3000, 8, 43, 128, 4);
    CHECK(a.W0_hat.value == b.W0_hat.value);
    CHECK(a.BK_hat.value == b.BK_hat.value);
    CHECK(a.W0_hat.se == b.W0_hat.se);
    CHECK(a.empirical.x_max == b.empirical.x_max);
    CHECK(a.empirical.cdf == b.empirical.cdf);
}

TEST_CASE("deterministic cycles are recovered exactly") {
    // reneging det(2)+det(1), T=2, K=5: the path cycles 3,4,5 after warmup,
    // one loss per cycle
    auto ren = make_cfg(2, 5, DistributionSpec::deterministic(2),
                        DistributionSpec::deterministic(1));
    auto s = estimate_stationary(ren, 10000, 1000, 2, 1, 64);
    CHECK_FALSE(s.stable);
    CHECK(s.W0_hat.value == 0.0);
    CHECK(s.BK_hat.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(s.mean_wait.value == doctest::Approx(4.0).epsilon(1e-12));

    // balking det(4)+det(0), T=2, K=5: workload alternates 4, 6
    auto blk = make_cfg(2, 5, DistributionSpec::deterministic(4),
                        DistributionSpec::deterministic(0), Discipline::balking);
    auto sb = estimate_stationary(blk, 10000, 1000, 2, 1, 64);
    CHECK(sb.W0_hat.value == 0.0);
    CHECK(sb.BK_hat.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sb.mean_wait.value == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("two-sample ks statistic and significance") {
    KsResult hand = ks_two_sample({1.0, 2.0, 3.0}, {1.5, 2.5});
    CHECK(hand.statistic == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(hand.p_value == doctest::Approx(0.9906231638691569).epsilon(1e-12));

    std::vector<double> same = {0.1, 0.4, 0.4, 0.9, 2.0};
    KsResult id = ks_two_sample(same, same);
    CHECK(id.statistic == 0.0);
    CHECK(id.p_value == 1.0);

    CHECK_THROWS_AS(ks_two_sample({}, {1.0}), SpecError);
}

TEST_CASE("stationary sample streams") {
    auto v = stationary_samples(cfg_s5(), 5000, 1000, 3);
    CHECK(v.size() == 5000);
    for (double w : v) {
        CHECK(w >= 0.0);
        CHECK(w <= 3.0);
    }
    // balking workloads may exceed the deadline
    auto b = stationary_samples(cfg_s5(Discipline::balking), 5000, 1000, 3);
    CHECK(std::any_of(b.begin(), b.end(), [](double w) { return w > 3.0; }));
    // per-service vacation indexing draws a different stream
    auto p = stationary_samples(cfg_s5(), 5000, 1000, 3, 10, VacationIndexing::per_service);
    CHECK(p != v);
}

TEST_CASE("estimation guards") {
    CHECK_THROWS_AS(estimate_stationary(cfg_s5(), 1000, 1000, 4, 1), SpecError);
    CHECK_THROWS_AS(estimate_stationary(cfg_s5(), 1000, 100, 0, 1), SpecError);
    CHECK_THROWS_AS(estimate_stationary(cfg_s5(), 1000, 100, 4, 1, 1), SpecError);
    CHECK_THROWS_AS(estimate_transient_tail(cfg_s5(), 0, 1.0, 100, 1), SpecError);
    CHECK_THROWS_AS(estimate_transient_tail(cfg_s5(), 1, -1.0, 100, 1), SpecError);
    CHECK_THROWS_AS(estimate_transient_tail(cfg_s5(), 1, 1.0, 0, 1), SpecError);
    CHECK_THROWS_AS(stationary_samples(cfg_s5(), 0, 10, 1), SpecError);
    CHECK_THROWS_AS(stationary_samples(cfg_s5(), 10, 10, 1, 0), SpecError);
}

}  // TEST_SUITE
