#include <cmath>
#include <vector>

#include "doctest.h"
#include "vacq/kernel.hpp"
#include "vacq/rng.hpp"

using namespace vacq;

namespace {

QueueConfig make_cfg(double T, double K, DistributionSpec s, DistributionSpec v) {
    QueueConfig c;
    c.T = T;
    c.K = K;
    c.service = std::move(s);
    c.vacation = std::move(v);
    return c;
}

QueueConfig cfg_s5() {
    return make_cfg(2, 3, DistributionSpec::deterministic(0.5), DistributionSpec::exponential(1));
}

QueueConfig cfg_s6() {
    return make_cfg(1, 2, DistributionSpec::exponential(2), DistributionSpec::exponential(1));
}

// two-exponential convolution cdf, rates 1 and 2, written out by hand
double g_exp12(double y) {
    if (y <= 0.0) return 0.0;
    return 1.0 - 2.0 * std::exp(-y) + std::exp(-2.0 * y);
}

// deterministic 0.5 + exp(1) convolution cdf by hand
double g_det_exp(double y) { return y <= 0.5 ? 0.0 : -std::expm1(-(y - 0.5)); }

// direct window-sum oracle against a hand-written G; truncated at n_max
double direct_kernel(double x, double w, double T, double K, double (*G)(double), int n_max) {
    double s = G(x - w + T);
    for (int n = 1; n <= n_max; ++n) {
        double a = x - w + (n + 1) * T;
        double b = K - w + n * T;
        s += std::max(0.0, G(a) - G(b));
    }
    return s;
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("window endpoints") {
    auto p = ab_sequences(1.0, 0.0, 0, 2.0, 3.0);
    CHECK(p.a == 3.0);
    CHECK(p.b == 0.0);

    p = ab_sequences(1.0, 0.5, 2, 2.0, 3.0);
    CHECK(p.a == 6.5);
    CHECK(p.b == 6.5);

    p = ab_sequences(0.0, 0.0, 1, 1.0, 3.0);
    CHECK(p.a == 2.0);
    CHECK(p.b == 4.0);
}

TEST_CASE("convolution cdf closed cases") {
    auto c = cfg_s6();
    CHECK(conv_cdf(c, std::log(2.0)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(conv_cdf(c, -1.0) == 0.0);
    CHECK(conv_cdf(c, 0.0) == 0.0);

    auto d = cfg_s5();
    CHECK(conv_cdf(d, 0.5) == 0.0);
    CHECK(conv_cdf(d, 1.5) == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-14));

    auto pt = make_cfg(2, 5, DistributionSpec::deterministic(2),
                       DistributionSpec::deterministic(1));
    CHECK(conv_cdf(pt, 3.0 - 1e-12) == 0.0);
    CHECK(conv_cdf(pt, 3.0) == 1.0);

    auto eq = make_cfg(1, 2, DistributionSpec::exponential(1), DistributionSpec::exponential(1));
    CHECK_THROWS_AS(conv_cdf(eq, 1.0), SpecError);
}

TEST_CASE("tabulated-uniform plus exponential convolution") {
    // uniform on [0,1] convolved with exp(2):
    //   F(y) = y - (1 - e^{-2y})/2            for 0 <= y <= 1
    //   F(y) = 1 - e^{-2y} (e^2 - 1)/2        for y > 1
    auto c = make_cfg(1, 2, DistributionSpec::tabulated({0.0, 1.0}, {0.0, 1.0}),
                      DistributionSpec::exponential(2));
    auto exact = [](double y) {
        if (y <= 0.0) return 0.0;
        if (y <= 1.0) return y - (1.0 - std::exp(-2.0 * y)) / 2.0;
        return 1.0 - std::exp(-2.0 * y) * (std::exp(2.0) - 1.0) / 2.0;
    };
    for (double y : {0.25, 0.5, 0.75, 1.0, 1.5, 2.5, 6.0})
        CHECK(conv_cdf(c, y) == doctest::Approx(exact(y)).epsilon(1e-5).scale(1.0));
}

TEST_CASE("kernel short-circuit is the bare convolution cdf") {
    for (auto cfg : {cfg_s5(), cfg_s6()}) {
        auto params = KernelParams::make(cfg);
        CounterRng rng(77);
        int checked = 0;
        for (std::size_t i = 0; checked < 2000; ++i) {
            double x = rng.uniform(2 * i) * (cfg.K - cfg.T);
            double w = rng.uniform(2 * i + 1) * cfg.K * 0.9999;
            if (x < 0.0 || x + cfg.T > cfg.K) continue;
            CHECK(kernel_sum(x, w, params) == conv_cdf(cfg, x - w + cfg.T));
            ++checked;
        }
    }
}

TEST_CASE("kernel sum matches the direct window sum") {
    auto c6 = cfg_s6();
    c6.K = 1.2;
    auto params = KernelParams::make(c6);
    // spec probe point
    double got = kernel_sum(0.5, 0.0, params);
    double want = direct_kernel(0.5, 0.0, 1.0, 1.2, g_exp12, 10000);
    CHECK(std::abs(got - want) < 1e-10);

    for (double x : {0.3, 0.7, 1.0, 1.2})
        for (double w : {0.0, 0.4, 0.9, 1.19}) {
            got = kernel_sum(x, w, params);
            want = direct_kernel(x, w, 1.0, 1.2, g_exp12, 10000);
            CHECK(std::abs(got - want) < 1e-10);
        }
}

TEST_CASE("analytic geometric tail agrees with brute truncation on a grid") {
    auto params = KernelParams::make(cfg_s5());
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            double x = 3.0 * i / 99.0;
            double w = 3.0 * j / 100.0 * 0.999;
            double got = kernel_sum(x, w, params);
            double want = direct_kernel(x, w, 2.0, 3.0, g_det_exp, 60);
            CHECK(std::abs(got - want) <= 1e-12);
        }
}

TEST_CASE("kernel sums to one at the deadline") {
    for (auto cfg : {cfg_s5(), cfg_s6()}) {
        auto params = KernelParams::make(cfg);
        for (double w : {0.0, 0.7, 1.4, 1.99})
            CHECK(kernel_sum(cfg.K, w * cfg.K / 2.0, params) ==
                  doctest::Approx(1.0).epsilon(1e-12));
    }
    // bounded tabulated service: exact truncation path
    auto tab = make_cfg(1, 2, DistributionSpec::tabulated({0.0, 1.0}, {0.0, 1.0}),
                        DistributionSpec::exponential(2));
    auto params = KernelParams::make(tab);
    for (double w : {0.0, 0.5, 1.5})
        CHECK(kernel_sum(2.0, w, params) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("loss sum") {
    auto params = KernelParams::make(cfg_s5());
    CHECK(loss_sum(0.0, params) == doctest::Approx(0.012847750489722188).epsilon(1e-13));

    // bounded support: no window survives when K - w + T clears the top
    auto det = make_cfg(2, 5, DistributionSpec::deterministic(2),
                        DistributionSpec::deterministic(1));
    auto pd = KernelParams::make(det);
    CHECK(loss_sum(1.0, pd) == 0.0);
    CHECK(loss_sum(4.5, pd) == 1.0);  // 5-4.5+2 = 2.5 < 3: one full window survives

    // w -> K with zero service: the sum tends to alpha_lambda
    auto z = make_cfg(2, 3, DistributionSpec::deterministic(0), DistributionSpec::exponential(1));
    auto pz = KernelParams::make(z);
    double alpha = std::exp(-2.0) / -std::expm1(-2.0);
    CHECK(loss_sum(3.0 - 1e-12, pz) == doctest::Approx(alpha).epsilon(1e-9));

    CHECK_THROWS_AS(loss_sum(3.0, params), SpecError);
    CHECK_THROWS_AS(loss_sum(-0.1, params), SpecError);
}

TEST_CASE("kernel domain guards") {
    auto params = KernelParams::make(cfg_s5());
    CHECK_THROWS_AS(kernel_sum(-0.1, 0.0, params), SpecError);
    CHECK_THROWS_AS(kernel_sum(3.1, 0.0, params), SpecError);
    CHECK_THROWS_AS(kernel_sum(1.0, 3.0, params), SpecError);
    CHECK_THROWS_AS(kernel_sum(1.0, -0.1, params), SpecError);
}

TEST_CASE("uncertifiable series truncation raises ConvergenceError") {
    // bounded support 10 with T = 1e-5 needs ~9e5 window terms
    auto c = make_cfg(1e-5, 1.0, DistributionSpec::tabulated({0.0, 1.0}, {0.0, 10.0}),
                      DistributionSpec::deterministic(0));
    auto params = KernelParams::make(c);
    CHECK_THROWS_AS(loss_sum(0.0, params), ConvergenceError);
}

TEST_CASE("oversized tabulated convolution grid is rejected") {
    auto c = make_cfg(0.001, 10.0, DistributionSpec::tabulated({0.0, 1.0}, {0.0, 1.0}),
                      DistributionSpec::tabulated({0.0, 1.0}, {0.0, 1.0}));
    CHECK_THROWS_AS(KernelParams::make(c), SpecError);
}

TEST_CASE("convolution mean is the sum of the component means") {
    auto c = make_cfg(1, 2, DistributionSpec::tabulated({0.0, 0.5, 1.0}, {0.2, 0.4, 0.9}),
                      DistributionSpec::exponential(2));
    auto params = KernelParams::make(c);
    CHECK(params.conv->mean() == doctest::Approx(0.475 + 0.5).epsilon(1e-14));
}

}  // TEST_SUITE
