#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "vacq/model.hpp"
#include "vacq/rng.hpp"

using namespace vacq;

namespace {

DistributionSpec demo_tab() {
    return DistributionSpec::tabulated({0.0, 0.5, 1.0}, {0.2, 0.4, 0.9});
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("parse accepts the three prefixes") {
    auto d = DistributionSpec::parse("det:0.5");
    CHECK(d.kind == DistKind::deterministic);
    CHECK(d.value == 0.5);

    auto e = DistributionSpec::parse("exp:2");
    CHECK(e.kind == DistKind::exponential);
    CHECK(e.rate == 2.0);

    const char* path = "model_tab_tmp.csv";
    {
        std::ofstream f(path);
        f << "p,q\n0,0.2\n0.5,0.4\n1,0.9\n";
    }
    auto t = DistributionSpec::parse(std::string("tab:") + path);
    CHECK(t.kind == DistKind::tabulated);
    CHECK(t.levels == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(t.quantiles == std::vector<double>{0.2, 0.4, 0.9});
    std::remove(path);
}

TEST_CASE("parse rejects malformed specs") {
    CHECK_THROWS_AS(DistributionSpec::parse("det:-1"), SpecError);
    CHECK_THROWS_AS(DistributionSpec::parse("exp:0"), SpecError);
    CHECK_THROWS_AS(DistributionSpec::parse("exp:-2"), SpecError);
    CHECK_THROWS_AS(DistributionSpec::parse("gamma:1"), SpecError);
    CHECK_THROWS_AS(DistributionSpec::parse("det:1x"), SpecError);
    CHECK_THROWS_AS(DistributionSpec::parse("det:"), SpecError);
    CHECK_THROWS_AS(DistributionSpec::parse(""), SpecError);
    CHECK_THROWS_AS(DistributionSpec::parse("tab:/no/such/file.csv"), SpecError);
}

TEST_CASE("tabulated csv needs the exact header and valid rows") {
    const char* path = "model_tab_bad.csv";
    {
        std::ofstream f(path);
        f << "prob,quantile\n0,0\n1,1\n";
    }
    CHECK_THROWS_AS(DistributionSpec::parse(std::string("tab:") + path), SpecError);
    {
        std::ofstream f(path);
        f << "p,q\n0,1\n1,0.5\n";  // decreasing quantiles
    }
    CHECK_THROWS_AS(DistributionSpec::parse(std::string("tab:") + path), SpecError);
    std::remove(path);
}

TEST_CASE("tabulated factory validates shape") {
    CHECK_THROWS_AS(DistributionSpec::tabulated({0.0}, {1.0}), SpecError);
    CHECK_THROWS_AS(DistributionSpec::tabulated({0.1, 1.0}, {0.0, 1.0}), SpecError);
    CHECK_THROWS_AS(DistributionSpec::tabulated({0.0, 0.9}, {0.0, 1.0}), SpecError);
    CHECK_THROWS_AS(DistributionSpec::tabulated({0.0, 0.5, 0.5, 1.0}, {0.0, 1.0, 2.0, 3.0}),
                    SpecError);
    CHECK_THROWS_AS(DistributionSpec::tabulated({0.0, 1.0}, {1.0, 0.5}), SpecError);
    CHECK_THROWS_AS(DistributionSpec::tabulated({0.0, 1.0}, {-0.5, 1.0}), SpecError);
}

TEST_CASE("deterministic law") {
    auto d = DistributionSpec::deterministic(1.5);
    CHECK(d.sample(0.0) == 1.5);
    CHECK(d.sample(0.999) == 1.5);
    CHECK(d.cdf(1.5 - 1e-12) == 0.0);
    CHECK(d.cdf(1.5) == 1.0);
    CHECK(d.cdf_strict(1.5) == 0.0);
    CHECK(d.cdf_strict(1.5 + 1e-12) == 1.0);
    CHECK(d.mean() == 1.5);
    CHECK(d.bounded());
    CHECK(d.upper() == 1.5);
}

TEST_CASE("exponential law") {
    auto e = DistributionSpec::exponential(2.0);
    CHECK(e.sample(0.0) == 0.0);
    CHECK(e.sample(-std::expm1(-3.0)) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(e.cdf(1.0) == doctest::Approx(-std::expm1(-2.0)).epsilon(1e-15));
    CHECK(e.cdf(-1.0) == 0.0);
    CHECK(e.cdf_strict(0.7) == e.cdf(0.7));
    CHECK(e.mean() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(e.bounded());
}

TEST_CASE("tabulated law interpolates the inverse cdf") {
    auto t = demo_tab();
    CHECK(t.sample(0.0) == 0.2);
    CHECK(t.sample(0.25) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(t.sample(0.5) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(t.sample(0.75) == doctest::Approx(0.65).epsilon(1e-14));
    CHECK(t.cdf(0.1) == 0.0);
    CHECK(t.cdf(0.3) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(t.cdf(0.9) == 1.0);
    CHECK(t.cdf(2.0) == 1.0);
    CHECK(t.mean() == doctest::Approx(0.5 * 0.3 + 0.5 * 0.65).epsilon(1e-14));
    CHECK(t.bounded());
    CHECK(t.upper() == 0.9);
}

TEST_CASE("tabulated atom: cdf right-continuous, cdf_strict takes the left limit") {
    auto t = DistributionSpec::tabulated({0.0, 0.4, 1.0}, {0.5, 0.5, 2.0});
    CHECK(t.cdf(0.5) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(t.cdf_strict(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(t.cdf(0.5 - 1e-9) == 0.0);
    CHECK(t.sample(0.2) == 0.5);
}

TEST_CASE("sampling matches the analytic cdf") {
    auto t = demo_tab();
    CounterRng rng(12345);
    const std::size_t n = 20000;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = t.sample(rng.uniform(i));
    double sup = 0.0;
    for (int g = 0; g <= 100; ++g) {
        double x = 0.2 + 0.7 * g / 100.0;
        double emp = 0.0;
        for (double v : xs) emp += v <= x ? 1.0 : 0.0;
        emp /= static_cast<double>(n);
        sup = std::max(sup, std::abs(emp - t.cdf(x)));
    }
    CHECK(sup < 0.02);
}

TEST_CASE("config validation") {
    QueueConfig c;
    c.T = 2.0;
    c.K = 3.0;
    c.service = DistributionSpec::deterministic(0.5);
    c.vacation = DistributionSpec::exponential(1.0);
    CHECK_NOTHROW(c.validate());
    c.T = 0.0;
    CHECK_THROWS_AS(c.validate(), SpecError);
    c.T = 2.0;
    c.K = -1.0;
    CHECK_THROWS_AS(c.validate(), SpecError);
}

TEST_CASE("stability probability") {
    QueueConfig c;
    c.T = 1.0;
    c.K = 2.0;
    c.service = DistributionSpec::exponential(2.0);
    c.vacation = DistributionSpec::exponential(1.0);
    auto s = check_stability(c);
    CHECK(s.stable);
    // P(sigma + v < 1) = 1 - 2 e^{-1} + e^{-2}
    CHECK(s.probability == doctest::Approx(0.3995764008937992).epsilon(1e-12));

    c.T = 2.0;
    c.K = 3.0;
    c.service = DistributionSpec::deterministic(0.5);
    c.vacation = DistributionSpec::exponential(1.0);
    s = check_stability(c);
    CHECK(s.stable);
    CHECK(s.probability == doctest::Approx(-std::expm1(-1.5)).epsilon(1e-12));

    c.service = DistributionSpec::deterministic(3.0);
    s = check_stability(c);
    CHECK_FALSE(s.stable);
    CHECK(s.probability == 0.0);

    // boundary: sigma + v == T exactly has probability zero below T
    c.T = 2.0;
    c.service = DistributionSpec::deterministic(2.0);
    c.vacation = DistributionSpec::deterministic(0.0);
    s = check_stability(c);
    CHECK_FALSE(s.stable);

    c.service = DistributionSpec::deterministic(0.5);
    c.vacation = DistributionSpec::deterministic(1.0);
    s = check_stability(c);
    CHECK(s.stable);
    CHECK(s.probability == 1.0);
}

TEST_CASE("node_density reproduces panel totals under the trapezoid rule") {
    std::vector<double> p{0.25, 0.35};
    auto f = node_density(p, 0.5);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f[1] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(f[2] == doctest::Approx(0.7).epsilon(1e-15));

    CounterRng rng(9);
    std::vector<double> masses(64);
    double total = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        masses[i] = rng.uniform(i);
        total += masses[i];
    }
    double h = 0.03125;
    auto nodes = node_density(masses, h);
    double trapz = 0.5 * (nodes.front() + nodes.back());
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) trapz += nodes[i];
    trapz *= h;
    CHECK(std::abs(trapz - total) < 1e-13);
}

TEST_CASE("MixedDistribution accessors and validation") {
    MixedDistribution d;
    d.atom0 = 0.3;
    d.x_max = 1.0;
    d.density = node_density({0.25, 0.35}, 0.5);
    d.cdf = {0.3, 0.55, 0.9};
    d.boundary_mass = 0.1;
    CHECK_NOTHROW(d.validate());
    CHECK(d.h() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.trapezoid_density() == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(d.normalization_error() < 1e-14);
    CHECK(d.cdf_at(-1.0) == 0.0);
    CHECK(d.cdf_at(0.0) == 0.3);
    CHECK(d.cdf_at(0.25) == doctest::Approx(0.425).epsilon(1e-14));
    CHECK(d.cdf_at(1.0) == 1.0);
    CHECK(d.cdf_at(5.0) == 1.0);

    MixedDistribution bad = d;
    bad.cdf = {0.3, 0.2, 0.9};  // not monotone
    CHECK_THROWS_AS(bad.validate(), SpecError);

    bad = d;
    bad.boundary_mass = 0.2;  // breaks normalization
    CHECK_THROWS_AS(bad.validate(), SpecError);

    bad = d;
    bad.density[1] = -0.1;
    CHECK_THROWS_AS(bad.validate(), SpecError);
}

}  // TEST_SUITE
