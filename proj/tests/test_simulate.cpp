#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sbm/simulate.hpp"

using namespace sbm;

namespace {

ModelParams sim_params() {
    ModelParams p;
    p.mu_P = 2.0;
    p.sigma_P = 0.5;
    p.mu_S = 0.05;
    p.sigma_S = 0.3;
    p.tau = 0.0;
    p.L = 0.0;
    p.phi0 = 1.0;
    return p;
}

SampledPath path_of(std::vector<double> values, double step, double start = 0.0) {
    SampledPath p;
    p.step = step;
    p.start_time = start;
    p.values = std::move(values);
    return p;
}

}  // namespace

TEST_CASE("simulation is deterministic per (seed, path)") {
    const ModelParams p = sim_params();
    const auto a = simulate_paths(p, 450.0, 0.1, 1.0 / 365.0, 2, 99);
    const auto b = simulate_paths(p, 450.0, 0.1, 1.0 / 365.0, 2, 99);
    REQUIRE(a.size() == 2);
    CHECK(a[0].price.values == b[0].price.values);
    CHECK(a[0].sentiment.values == b[0].sentiment.values);
    CHECK(a[1].price.values == b[1].price.values);
    CHECK(a[0].price.values != a[1].price.values);

    // path k is the same whether simulated alone or in a batch
    const auto solo = simulate_paths(p, 450.0, 0.1, 1.0 / 365.0, 1, 99);
    CHECK(solo[0].price.values == a[0].price.values);

    REQUIRE(a[0].price.values.size() == 37);  // floor(0.1 * 365) + 1
    CHECK(a[0].price.values[0] == 450.0);
    CHECK(a[0].sentiment.values[0] == 1.0);
    CHECK(a[0].price.step == 1.0 / 365.0);
}

TEST_CASE("simulation rejects bad arguments") {
    ModelParams p = sim_params();
    CHECK_THROWS_AS(simulate_paths(p, -1.0, 1.0, 1.0 / 365.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_paths(p, 450.0, 0.0005, 1.0 / 365.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_paths(p, 450.0, 1.0, 1.0 / 365.0, 0, 1), std::invalid_argument);
    p.tau = 1.4 / 365.0;  // not a grid multiple
    p.L = p.tau;
    CHECK_THROWS_AS(simulate_paths(p, 450.0, 1.0, 1.0 / 365.0, 1, 1), std::invalid_argument);
}

TEST_CASE("sentiment marginal matches the exact lognormal law") {
    const ModelParams p = sim_params();
    const double T = 0.5, step = 1.0 / 365.0;
    const int n = 4000;
    const auto paths = simulate_paths(p, 450.0, T, step, n, 2024);
    const double t_eff = std::floor(T / step) * step;
    double s = 0.0, s2 = 0.0;
    for (const auto& pp : paths) {
        const double x = std::log(pp.sentiment.values.back());
        s += x;
        s2 += x * x;
    }
    const double m = s / n;
    const double v = (s2 / n - m * m) * n / (n - 1.0);
    const double want_m = (p.mu_P - 0.5 * p.sigma_P * p.sigma_P) * t_eff;
    const double want_v = p.sigma_P * p.sigma_P * t_eff;
    CHECK(std::fabs(m - want_m) < 4.0 * std::sqrt(want_v / n));
    CHECK(std::fabs(v - want_v) < 4.0 * want_v * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("risk-neutral simulation is a discounted martingale") {
    ModelParams p = sim_params();
    p.mu_P = 0.03;
    p.sigma_P = 0.35;
    p.phi0 = 100.0;
    p.sigma_S = 0.04;
    p.tau = 10.0 / 365.0;
    p.L = p.tau;
    const double r = 0.01, T = 30.0 / 365.0, s0 = 450.0;
    const int n = 20000;
    const auto paths = simulate_paths(p, s0, T, 1.0 / 365.0, n, 7, Measure{true, r});
    double s = 0.0, s2 = 0.0;
    for (const auto& pp : paths) {
        const double v = pp.price.values.back();
        s += v;
        s2 += v * v;
    }
    const double m = s / n;
    const double sd = std::sqrt((s2 / n - m * m) * n / (n - 1.0));
    const double disc = std::exp(-r * std::floor(T * 365.0) / 365.0) * m;
    CHECK(std::fabs(disc - s0) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("return sample aggregation, aligned series") {
    const double d = 0.01;
    const std::vector<double> sent{10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0};
    const std::vector<double> price{100.0, 101.0, 103.0, 106.0, 110.0, 115.0, 121.0};
    const SampledPath sp = path_of(sent, d), pp = path_of(price, d);

    SUBCASE("no delay") {
        const ReturnSample s = build_return_sample(pp, sp, 2.0 * d, 0.0);
        REQUIRE(s.returns.size() == 3);
        CHECK(s.cumulants[0] == doctest::Approx(d * (11.0 + 12.0)).epsilon(1e-15));
        CHECK(s.cumulants[1] == doctest::Approx(d * (13.0 + 14.0)).epsilon(1e-15));
        CHECK(s.cumulants[2] == doctest::Approx(d * (15.0 + 16.0)).epsilon(1e-15));
        CHECK(s.returns[0] == doctest::Approx(std::log(103.0 / 100.0)).epsilon(1e-15));
        CHECK(s.returns[2] == doctest::Approx(std::log(121.0 / 110.0)).epsilon(1e-15));
        CHECK(s.x_tau == 0.0);
        CHECK(s.s1 == doctest::Approx(2.0 * d).epsilon(1e-15));
        CHECK(s.phi0 == 10.0);
        CHECK(s.tau == 0.0);
    }
    SUBCASE("one-step delay reaches into the pre-history") {
        const ReturnSample s = build_return_sample(pp, sp, 2.0 * d, d);
        REQUIRE(s.returns.size() == 3);
        CHECK(s.cumulants[0] == doctest::Approx(d * (10.0 + 11.0)).epsilon(1e-15));
        CHECK(s.cumulants[1] == doctest::Approx(d * (12.0 + 13.0)).epsilon(1e-15));
        CHECK(s.x_tau == doctest::Approx(d * 10.0).epsilon(1e-15));
        CHECK(s.s1 == doctest::Approx(d).epsilon(1e-15));
    }
    SUBCASE("fully deterministic leading windows are dropped") {
        const ReturnSample s = build_return_sample(pp, sp, 2.0 * d, 3.0 * d);
        REQUIRE(s.returns.size() == 2);  // first window is all pre-history
        CHECK(s.cumulants[0] == doctest::Approx(d * (10.0 + 11.0)).epsilon(1e-15));
        CHECK(s.x_tau == doctest::Approx(d * 10.0).epsilon(1e-15));
        CHECK(s.s1 == doctest::Approx(d).epsilon(1e-15));
        CHECK(s.returns[0] == doctest::Approx(std::log(110.0 / 103.0)).epsilon(1e-15));
    }
    SUBCASE("windows past the sentiment series are dropped at the tail") {
        const SampledPath short_sent = path_of({10.0, 11.0, 12.0, 13.0, 14.0}, d);
        const ReturnSample s = build_return_sample(pp, short_sent, 2.0 * d, 0.0);
        REQUIRE(s.returns.size() == 2);
        CHECK(s.cumulants[1] == doctest::Approx(d * (13.0 + 14.0)).epsilon(1e-15));
    }
}

TEST_CASE("return sample aggregation, offset starts") {
    const double d = 0.01;
    const SampledPath sp = path_of({9.0, 8.0, 7.0, 6.5, 6.0, 5.5, 5.0, 4.5, 4.0}, d, 0.0);
    const SampledPath pp = path_of({100.0, 104.0, 108.0, 112.0, 116.0}, d, 2.0 * d);
    const ReturnSample s = build_return_sample(pp, sp, 2.0 * d, d);
    REQUIRE(s.returns.size() == 2);
    CHECK(s.cumulants[0] == doctest::Approx(d * (7.0 + 6.5)).epsilon(1e-15));
    CHECK(s.cumulants[1] == doctest::Approx(d * (6.0 + 5.5)).epsilon(1e-15));
    CHECK(s.returns[0] == doctest::Approx(std::log(108.0 / 100.0)).epsilon(1e-15));
    CHECK(s.returns[1] == doctest::Approx(std::log(116.0 / 108.0)).epsilon(1e-15));
    CHECK(s.x_tau == 0.0);  // offset series carry no pre-history convention
    CHECK(s.s1 == doctest::Approx(2.0 * d).epsilon(1e-15));
    CHECK(s.phi0 == 8.0);  // sentiment level at the first window start
}

TEST_CASE("return sample input validation") {
    const double d = 0.01;
    const SampledPath sp = path_of({1.0, 2.0, 3.0, 4.0, 5.0}, d);
    const SampledPath pp = path_of({1.0, 2.0, 3.0, 4.0, 5.0}, d);
    CHECK_THROWS_AS(build_return_sample(pp, sp, 1.5 * d, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_return_sample(pp, sp, 2.0 * d, 0.5 * d), std::invalid_argument);
    CHECK_THROWS_AS(build_return_sample(pp, path_of({1.0, 2.0}, 2.0 * d), 2.0 * d, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_return_sample(pp, path_of({1.0, -2.0, 3.0, 4.0, 5.0}, d), 2.0 * d, 0.0),
                    std::invalid_argument);
    // misaligned starts
    const SampledPath off = path_of({1.0, 2.0, 3.0, 4.0, 5.0}, d, 0.4 * d);
    CHECK_THROWS_AS(build_return_sample(off, sp, 2.0 * d, 0.0), std::invalid_argument);
    // every window deterministic or invalid
    const SampledPath tiny = path_of({1.0, 2.0, 3.0}, d);
    CHECK_THROWS_AS(build_return_sample(tiny, tiny, 2.0 * d, 10.0 * d), std::invalid_argument);
}

TEST_CASE("pre-aggregated ingestion") {
    const std::vector<double> returns{0.01, 0.02, 0.03, 0.04, 0.05};
    const std::vector<double> obs{1.5, 1.6, 1.7};
    const double delta = 7.0 / 365.0;
    const ReturnSample s = ingest_preaggregated(returns, obs, delta, 1);
    REQUIRE(s.returns.size() == 3);
    CHECK(s.returns[0] == 0.02);
    CHECK(s.returns[2] == 0.04);
    CHECK(s.cumulants[0] == 1.5);
    CHECK(s.x_tau == 0.0);
    CHECK(s.s1 == delta);
    CHECK(s.phi0 == doctest::Approx(1.5 / delta).epsilon(1e-15));
    CHECK(s.tau == doctest::Approx(delta).epsilon(1e-15));

    CHECK_THROWS_AS(ingest_preaggregated(returns, obs, delta, -1), std::invalid_argument);
    CHECK_THROWS_AS(ingest_preaggregated(returns, {1.0, -1.0}, delta, 0), std::invalid_argument);
    CHECK_THROWS_AS(ingest_preaggregated({0.01, 0.02}, obs, delta, 2), std::invalid_argument);
    CHECK_THROWS_AS(ingest_preaggregated(returns, obs, 0.0, 0), std::invalid_argument);
}
