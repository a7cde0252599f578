#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oamsim/fiber_noise.hpp"
#include "oamsim/rng.hpp"
#include "oracles.hpp"

using namespace oamsim;
using doctest::Approx;

TEST_CASE("seed mixing: frozen reference vectors") {
    CHECK(mix_seed(0, 0) == 0xa706dd2f4d197e6fULL);
    CHECK(mix_seed(0, 1) == 0xb382a305f4414f5eULL);
    CHECK(mix_seed(0xdeadbeefULL, 42) == 0x0251ad75c18a59d9ULL);
}

TEST_CASE("uniform stream stays inside the open unit interval") {
    SplitMix64 rng(99);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.next_open_unit();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("rayleigh pdf: zero at the origin, errors outside the domain") {
    CHECK(rayleigh_pdf(0.0, 0.3) == 0.0);
    CHECK_THROWS_AS(rayleigh_pdf(-0.1, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(rayleigh_pdf(0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rayleigh_pdf(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("rayleigh pdf: mode sits at sigma") {
    // set the derivative to zero and verify numerically
    for (double sigma : {0.05, 0.3, 2.0}) {
        const double peak =
            oracles::maximize([&](double x) { return rayleigh_pdf(x, sigma); }, 0.0, 6.0 * sigma);
        CHECK(peak == Approx(sigma).epsilon(1e-7));
    }
}

TEST_CASE("rayleigh pdf: quadrature mass matches the closed-form CDF") {
    const double sigma = 0.7;
    const double mass = oracles::integrate([&](double x) { return rayleigh_pdf(x, sigma); }, 0.0,
                                           5.0 * sigma, 1e-12);
    CHECK(std::abs(mass - (1.0 - std::exp(-12.5))) <= 1e-9);
}

TEST_CASE("rayleigh sampler: inverse-CDF identities") {
    const double sigma = 0.42;
    CHECK(sample_rayleigh(1.0 - std::exp(-0.5), sigma) == Approx(sigma).epsilon(1e-12));
    CHECK(sample_rayleigh(1e-300, sigma) > 0.0);
    CHECK(sample_rayleigh(1e-300, sigma) < 1e-100);
    CHECK_THROWS_AS(sample_rayleigh(0.0, sigma), std::invalid_argument);
    CHECK_THROWS_AS(sample_rayleigh(1.0, sigma), std::invalid_argument);
    CHECK_THROWS_AS(sample_rayleigh(-0.2, sigma), std::invalid_argument);
    CHECK_THROWS_AS(sample_rayleigh(0.5, -1.0), std::invalid_argument);
}

TEST_CASE("rayleigh sampler: monotone in u") {
    SplitMix64 rng(4);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.next_open_unit();
        double b = rng.next_open_unit();
        if (a > b) std::swap(a, b);
        CHECK(sample_rayleigh(a, 1.3) <= sample_rayleigh(b, 1.3));
    }
}

TEST_CASE("rayleigh sampler: moment identities over 1e6 samples") {
    const double sigma = 0.8;
    SplitMix64 rng(2024);
    const std::size_t n = 1000000;
    std::vector<double> samples(n);
    for (double& s : samples) s = sample_rayleigh(rng.next_open_unit(), sigma);
    const double mean = oracles::sample_mean(samples);
    const double variance = oracles::sample_variance(samples);
    CHECK(std::abs(mean - rayleigh_mean(sigma)) / rayleigh_mean(sigma) < 0.005);
    CHECK(std::abs(variance - rayleigh_variance(sigma)) / rayleigh_variance(sigma) < 0.01);
}

namespace {

FiberSpec test_spec(Correlation correlation, int segments, double sigma, double mean_phase,
                    int anchors) {
    FiberSpec spec;
    spec.length_m = 500.0;
    spec.segments = segments;
    spec.sigma = sigma;
    spec.mean_phase = mean_phase;
    spec.correlation = correlation;
    spec.anchor_count = anchors;
    return spec;
}

}  // namespace

TEST_CASE("noise profile: zero sigma degenerates to the constant drift") {
    const FiberSpec spec = test_spec(Correlation::kIid, 64, 0.0, 0.125, 8);
    const NoiseProfile profile = generate_noise_profile(spec, 7, 3);
    for (double d : profile.deltas) CHECK(d == 0.125);
}

TEST_CASE("noise profile: regeneration is bit-exact") {
    const FiberSpec spec = test_spec(Correlation::kIid, 200, 0.05, 0.01, 20);
    const NoiseProfile a = generate_noise_profile(spec, 99, 12345);
    const NoiseProfile b = generate_noise_profile(spec, 99, 12345);
    REQUIRE(a.deltas.size() == b.deltas.size());
    for (std::size_t i = 0; i < a.deltas.size(); ++i) CHECK(a.deltas[i] == b.deltas[i]);
}

TEST_CASE("noise profile: independent of generation order") {
    const FiberSpec spec = test_spec(Correlation::kIid, 50, 0.1, 0.0, 50);
    const NoiseProfile late = generate_noise_profile(spec, 5, 9);
    generate_noise_profile(spec, 5, 2);  // unrelated trial in between
    const NoiseProfile again = generate_noise_profile(spec, 5, 9);
    for (std::size_t i = 0; i < late.deltas.size(); ++i) CHECK(late.deltas[i] == again.deltas[i]);
}

TEST_CASE("noise profile: fully correlated mode has one shared value") {
    const FiberSpec spec = test_spec(Correlation::kFullyCorrelated, 8, 0.2, 0.05, 1);
    const NoiseProfile profile = generate_noise_profile(spec, 31, 6);
    REQUIRE(profile.deltas.size() == 8);
    for (double d : profile.deltas) CHECK(d == profile.deltas.front());
}

TEST_CASE("noise profile: distinct trials and seeds decorrelate") {
    const FiberSpec spec = test_spec(Correlation::kFullyCorrelated, 4, 0.2, 0.0, 1);
    const NoiseProfile t0 = generate_noise_profile(spec, 31, 0);
    const NoiseProfile t1 = generate_noise_profile(spec, 31, 1);
    const NoiseProfile other_seed = generate_noise_profile(spec, 32, 0);
    CHECK(t0.deltas[0] != t1.deltas[0]);
    CHECK(t0.deltas[0] != other_seed.deltas[0]);
}

TEST_CASE("noise profile: anchors-equal-segments deltas follow Rayleigh(sigma)") {
    // With one anchor per segment there is no interpolation smoothing; the
    // shifted deltas are raw Rayleigh draws (KS test at the 1% level).
    const double sigma = 0.3;
    const double mean_phase = 0.02;
    const FiberSpec spec = test_spec(Correlation::kIid, 1000, sigma, mean_phase, 1000);
    std::vector<double> shifted;
    shifted.reserve(100000);
    for (int t = 0; t < 100; ++t) {
        const NoiseProfile profile = generate_noise_profile(spec, 77, t);
        for (double d : profile.deltas) {
            shifted.push_back(d + rayleigh_mean(sigma) - mean_phase);
        }
    }
    const double d_stat = oracles::ks_statistic(
        shifted, [&](double x) { return x <= 0.0 ? 0.0 : rayleigh_cdf(x, sigma); });
    CHECK(d_stat < oracles::ks_critical_1pct(shifted.size()));
}

TEST_CASE("noise profile: interpolation hits the anchor grid exactly") {
    // With anchors at every other segment the even-index deltas are anchor
    // values and odd-index deltas are midpoints of their neighbors.
    const FiberSpec spec = test_spec(Correlation::kIid, 9, 0.4, 0.0, 5);
    const NoiseProfile profile = generate_noise_profile(spec, 3, 4);
    for (int j = 1; j < 9; j += 2) {
        const double mid = 0.5 * (profile.deltas[j - 1] + profile.deltas[j + 1]);
        CHECK(profile.deltas[j] == Approx(mid).epsilon(1e-12));
    }
}

TEST_CASE("noise profile: spec validation") {
    FiberSpec spec = test_spec(Correlation::kIid, 10, 0.1, 0.0, 11);
    CHECK_THROWS_AS(generate_noise_profile(spec, 0, 0), std::invalid_argument);
    spec.anchor_count = 0;
    CHECK_THROWS_AS(generate_noise_profile(spec, 0, 0), std::invalid_argument);
    spec.anchor_count = 1;
    spec.segments = 0;
    CHECK_THROWS_AS(generate_noise_profile(spec, 0, 0), std::invalid_argument);
    spec.segments = 10;
    spec.sigma = -0.5;
    CHECK_THROWS_AS(generate_noise_profile(spec, 0, 0), std::invalid_argument);
    spec.sigma = 0.5;
    spec.length_m = 0.0;
    CHECK_THROWS_AS(generate_noise_profile(spec, 0, 0), std::invalid_argument);
}

TEST_CASE("profile statistics: degenerate inputs") {
    const FiberSpec zero = test_spec(Correlation::kIid, 16, 0.0, 0.0, 4);
    std::vector<NoiseProfile> profiles;
    profiles.push_back(generate_noise_profile(zero, 1, 0));
    CHECK_THROWS_AS(profile_statistics(profiles), std::invalid_argument);
    profiles.push_back(generate_noise_profile(zero, 1, 1));
    const ProfileStats stats = profile_statistics(profiles);
    CHECK(stats.mean == 0.0);
    CHECK(stats.variance == 0.0);
}

TEST_CASE("profile statistics: deterministic drift only") {
    const FiberSpec spec = test_spec(Correlation::kFullyCorrelated, 12, 0.0, 0.3, 1);
    std::vector<NoiseProfile> profiles;
    for (int t = 0; t < 5; ++t) profiles.push_back(generate_noise_profile(spec, 2, t));
    const ProfileStats stats = profile_statistics(profiles);
    CHECK(stats.mean == Approx(0.3).epsilon(1e-15));
    CHECK(stats.variance == 0.0);
}

TEST_CASE("profile statistics: fully correlated variance matches the Rayleigh identity") {
    const double sigma = 0.1;
    const FiberSpec spec = test_spec(Correlation::kFullyCorrelated, 4, sigma, 0.0, 1);
    std::vector<NoiseProfile> profiles;
    profiles.reserve(100000);
    for (int t = 0; t < 100000; ++t) profiles.push_back(generate_noise_profile(spec, 8, t));
    const ProfileStats stats = profile_statistics(profiles);
    CHECK(std::abs(stats.variance - rayleigh_variance(sigma)) / rayleigh_variance(sigma) < 0.02);
    CHECK(std::abs(stats.mean) < 3.0 * std::sqrt(rayleigh_variance(sigma) / 100000.0) + 1e-6);
}
