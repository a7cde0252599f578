#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oamsim/rng.hpp"

namespace oamsim {

// How the random phase deviation is shared between segments of one trial.
//   kIid            — independent Rayleigh anchors along the fiber, linearly
//                     interpolated to every segment.
//   kFullyCorrelated — one Rayleigh draw per trial, shared by all segments.
enum class Correlation { kIid, kFullyCorrelated };

// Geometry and noise statistics of a segmented fiber. The fiber of total
// length length_m is modeled as `segments` concatenated homogeneous pieces;
// each piece contributes a phase error delta_phi_j with deterministic part
// mean_phase and a stochastic part derived from Rayleigh(sigma).
struct FiberSpec {
    double length_m = 500.0;
    int segments = 1000;
    double sigma = 0.0;        // Rayleigh scale parameter (radians)
    double mean_phase = 0.0;   // per-segment drift phi_0 (radians)
    Correlation correlation = Correlation::kFullyCorrelated;
    int anchor_count = 1;      // Rayleigh anchors used in kIid mode

    void validate() const {
        if (!(length_m > 0.0)) throw std::invalid_argument("FiberSpec: length_m must be positive");
        if (segments < 1) throw std::invalid_argument("FiberSpec: segments must be at least 1");
        if (sigma < 0.0) throw std::invalid_argument("FiberSpec: sigma must be nonnegative");
        if (anchor_count < 1 || anchor_count > segments) {
            throw std::invalid_argument("FiberSpec: anchor_count must be in [1, segments]");
        }
    }

    double segment_length() const { return length_m / segments; }
};

// One Monte Carlo trial: the phase error acquired in each segment.
// Regenerating with the same (master_seed, trial_id, FiberSpec) reproduces
// the deltas bit-exactly.
struct NoiseProfile {
    std::vector<double> deltas;
    std::int64_t trial_id = 0;
    std::uint64_t master_seed = 0;
};

inline double rayleigh_mean(double sigma) {
    return sigma * std::sqrt(std::numbers::pi / 2.0);
}

inline double rayleigh_variance(double sigma) {
    return (4.0 - std::numbers::pi) / 2.0 * sigma * sigma;
}

// f(x, sigma) = x/sigma^2 exp(-x^2 / (2 sigma^2)), x >= 0.
inline double rayleigh_pdf(double x, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("rayleigh_pdf: sigma must be positive");
    if (x < 0.0) throw std::invalid_argument("rayleigh_pdf: x must be nonnegative");
    const double s2 = sigma * sigma;
    return x / s2 * std::exp(-x * x / (2.0 * s2));
}

inline double rayleigh_cdf(double x, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("rayleigh_cdf: sigma must be positive");
    if (x < 0.0) throw std::invalid_argument("rayleigh_cdf: x must be nonnegative");
    return -std::expm1(-x * x / (2.0 * sigma * sigma));
}

// Inverse-CDF sampler: u in (0,1) maps to sigma * sqrt(-2 ln(1-u)),
// monotone increasing in u. sigma = 0 degenerates to the constant 0.
inline double sample_rayleigh(double u, double sigma) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw std::invalid_argument("sample_rayleigh: u must lie in the open interval (0,1)");
    }
    if (sigma < 0.0) throw std::invalid_argument("sample_rayleigh: sigma must be nonnegative");
    return sigma * std::sqrt(-2.0 * std::log1p(-u));
}

// Builds the per-segment phase errors of one trial. The stochastic part is
// re-centered about zero by subtracting the Rayleigh mean sigma*sqrt(pi/2),
// so the profile mean is mean_phase independently of sigma and sigma only
// controls the variance.
//
// kIid: anchor_count Rayleigh draws at equally spaced segment indices,
// linearly interpolated to all segments. With anchor_count == segments every
// segment is its own anchor and no smoothing occurs.
// kFullyCorrelated: a single draw shared by every segment.
inline NoiseProfile generate_noise_profile(const FiberSpec& spec, std::uint64_t master_seed,
                                           std::int64_t trial_id) {
    spec.validate();
    SplitMix64 rng(mix_seed(master_seed, static_cast<std::uint64_t>(trial_id)));
    const int n = spec.segments;
    const double mu = rayleigh_mean(spec.sigma);

    NoiseProfile profile;
    profile.trial_id = trial_id;
    profile.master_seed = master_seed;
    profile.deltas.resize(static_cast<std::size_t>(n));

    if (spec.correlation == Correlation::kFullyCorrelated) {
        const double draw = sample_rayleigh(rng.next_open_unit(), spec.sigma);
        const double value = spec.mean_phase + (draw - mu);
        for (double& d : profile.deltas) d = value;
        return profile;
    }

    const int anchors = spec.anchor_count;
    std::vector<double> anchor_values(static_cast<std::size_t>(anchors));
    for (double& a : anchor_values) a = sample_rayleigh(rng.next_open_unit(), spec.sigma);

    if (anchors == 1) {
        const double value = spec.mean_phase + (anchor_values[0] - mu);
        for (double& d : profile.deltas) d = value;
        return profile;
    }

    // Anchor i sits at segment index i*(n-1)/(anchors-1); segment j
    // interpolates between its bracketing anchors.
    const double scale = static_cast<double>(anchors - 1) / static_cast<double>(n - 1);
    for (int j = 0; j < n; ++j) {
        const double pos = static_cast<double>(j) * scale;
        int i0 = static_cast<int>(pos);
        if (i0 >= anchors - 1) i0 = anchors - 2;
        const double t = pos - static_cast<double>(i0);
        const double interpolated = (1.0 - t) * anchor_values[static_cast<std::size_t>(i0)] +
                                    t * anchor_values[static_cast<std::size_t>(i0) + 1];
        profile.deltas[static_cast<std::size_t>(j)] = spec.mean_phase + (interpolated - mu);
    }
    return profile;
}

struct ProfileStats {
    double mean = 0.0;
    double variance = 0.0;
};

// Pooled sample mean and (unbiased) variance over all segment deltas of all
// profiles; feeds the phi_0 and delta_phi^2 estimates of the analytic model.
inline ProfileStats profile_statistics(std::span<const NoiseProfile> profiles) {
    if (profiles.size() < 2) {
        throw std::invalid_argument("profile_statistics: at least 2 profiles required");
    }
    std::size_t count = 0;
    double sum = 0.0;
    bool constant = true;
    double first = profiles.front().deltas.empty() ? 0.0 : profiles.front().deltas.front();
    for (const NoiseProfile& p : profiles) {
        for (double d : p.deltas) {
            sum += d;
            constant = constant && d == first;
            ++count;
        }
    }
    if (count < 2) throw std::invalid_argument("profile_statistics: not enough samples");
    if (constant) return ProfileStats{first, 0.0};
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (const NoiseProfile& p : profiles) {
        for (double d : p.deltas) {
            const double dev = d - mean;
            sq += dev * dev;
        }
    }
    return ProfileStats{mean, sq / static_cast<double>(count - 1)};
}

}  // namespace oamsim
