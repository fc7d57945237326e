#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "beamsm/sm_bound.hpp"

using namespace beamsm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("update_bound examples") {
    BoundTracker full_memory(BoundMode::time_varying, 26.0, 1.0, 1.0, 0.75);
    for (double w : {0.0, 0.5, 10.0}) CHECK(full_memory.update(w) == 0.75);

    BoundTracker memoryless(BoundMode::time_varying, 4.0, 0.0, 1.0, 123.0);
    CHECK_THAT(memoryless.update(1.0), WithinAbs(2.0, 1e-15));

    BoundTracker typical(BoundMode::time_varying, 26.0, 0.992, 1.0, 1.0);
    const double got = typical.update(0.04);
    CHECK_THAT(got, WithinAbs(0.992 + 0.008 * std::sqrt(1.04), 1e-15));
    CHECK(typical.delta() == got);
}

TEST_CASE("init_bound examples") {
    CHECK(init_bound(BoundMode::fixed, 0.0, 0.0, 0.0, 0.0, 1.0).delta() == 1.0);
    CHECK_THAT(init_bound(BoundMode::time_varying, 26.0, 0.992, 1.0, 1.0 / 64.0).delta(),
               WithinAbs(std::sqrt(26.0 / 64.0), 1e-15));
    CHECK_THAT(init_bound(BoundMode::time_varying, 26.0, 0.992, 1.0, 1.0 / 64.0).delta(), WithinAbs(0.6374, 5e-5));
    CHECK_THAT(init_bound(BoundMode::time_varying, 4.0, 0.5, 1.0, 1.0).delta(), WithinAbs(2.0, 1e-15));
}

TEST_CASE("init_bound parameter errors") {
    CHECK_THROWS_AS(init_bound(BoundMode::time_varying, 1.0, 0.9, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(init_bound(BoundMode::time_varying, 0.5, 0.9, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(init_bound(BoundMode::time_varying, 26.0, 0.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(init_bound(BoundMode::time_varying, 26.0, 1.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(init_bound(BoundMode::fixed, 26.0, 0.9, 1.0, 1.0, -1.0), ParameterError);
    // fixed mode does not care about alpha/beta
    CHECK_NOTHROW(init_bound(BoundMode::fixed, 0.0, 7.0, 1.0, 1.0, 0.8));
}

TEST_CASE("negative weight norm is a domain error") {
    auto t = init_bound(BoundMode::time_varying, 26.0, 0.992, 1.0, 0.1);
    CHECK_THROWS_AS(t.update(-1e-9), ParameterError);
}

TEST_CASE("fixed mode ignores every input") {
    auto t = init_bound(BoundMode::fixed, 26.0, 0.992, 1.0, 0.3, 1.4);
    for (double w : {0.0, 1e-6, 3.0, 1e6}) {
        t.set_noise_power_estimate(w);
        CHECK(t.update(w) == 1.4);
    }
}

TEST_CASE("unrolled recursion equals the geometric closed form", "[property]") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> alpha(1.01, 50.0), beta(0.5, 0.9999), weight(0.0, 2.0), noise(0.01, 3.0);
    for (int t = 0; t < 20; ++t) {
        const double a = alpha(rng), b = beta(rng), w = weight(rng), s = noise(rng);
        auto tracker = init_bound(BoundMode::time_varying, a, b, s, weight(rng));
        const double d0 = tracker.delta();
        const double target = std::sqrt(a * w * s);
        for (int n = 1; n <= 1000; ++n) {
            const double got = tracker.update(w);
            const double bn = std::pow(b, n);
            CHECK_THAT(got, WithinAbs(bn * d0 + (1.0 - bn) * target, 1e-10));
        }
    }
}

TEST_CASE("bound is monotone in alpha and in the noise estimate", "[property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    std::vector<double> history(200);
    for (auto& w : history) w = weight(rng);

    auto run = [&](double alpha, double noise) {
        BoundTracker t(BoundMode::time_varying, alpha, 0.98, noise, 0.5);
        for (double w : history) t.update(w);
        return t.delta();
    };
    double prev = 0.0;
    for (double a : {1.5, 4.0, 10.0, 26.0, 40.0}) {
        const double d = run(a, 1.0);
        CHECK(d >= prev);
        prev = d;
    }
    prev = 0.0;
    for (double s : {0.01, 0.1, 1.0, 2.0}) {
        const double d = run(26.0, s);
        CHECK(d >= prev);
        prev = d;
    }
}

TEST_CASE("noise estimators") {
    NoiseEstimator oracle_est(NoiseEstimatorKind::oracle, 0.1);
    CHECK(oracle_est.observe({5.0, 1.0}, 1.0, 0.02) == 0.1);

    NoiseEstimator smoothed(NoiseEstimatorKind::smoothed, 0.1);
    // residual |1.2 - 1|^2 / 0.02 = 2
    const double got = smoothed.observe({1.2, 0.0}, 1.0, 0.02);
    CHECK_THAT(got, WithinRel(0.99 * 0.1 + 0.01 * 2.0, 1e-12));
    // negative real part decides -gamma
    NoiseEstimator neg(NoiseEstimatorKind::smoothed, 0.0);
    CHECK_THAT(neg.observe({-1.0, 0.5}, 1.0, 1.0), WithinRel(0.01 * 0.25, 1e-12));
    CHECK_THROWS_AS(NoiseEstimator(NoiseEstimatorKind::oracle, -1.0), ParameterError);
}
