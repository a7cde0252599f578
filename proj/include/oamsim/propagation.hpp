#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "oamsim/fiber_noise.hpp"
#include "oamsim/qstate.hpp"

namespace oamsim {

// Minimal 2x2 complex matrix, enough for the unitaries used here.
struct Unitary2 {
    cdouble m00, m01, m10, m11;

    StateVector2 apply(const StateVector2& psi) const {
        return StateVector2{m00 * psi.amp_plus + m01 * psi.amp_minus,
                            m10 * psi.amp_plus + m11 * psi.amp_minus};
    }

    Unitary2 operator*(const Unitary2& rhs) const {
        return Unitary2{m00 * rhs.m00 + m01 * rhs.m10, m00 * rhs.m01 + m01 * rhs.m11,
                        m10 * rhs.m00 + m11 * rhs.m10, m10 * rhs.m01 + m11 * rhs.m11};
    }

    cdouble determinant() const { return m00 * m11 - m01 * m10; }
};

// Free evolution through one segment: the two arms acquire opposite phases,
// diag(e^{+i l dphi / 2}, e^{-i l dphi / 2}). Unit determinant.
inline Unitary2 segment_operator(double delta_phi, int l) {
    const double half = 0.5 * static_cast<double>(l) * delta_phi;
    const cdouble up = std::polar(1.0, half);
    return Unitary2{up, 0.0, 0.0, std::conj(up)};
}

// Dove prism: exchanges |+l> and |-l>, i.e. the X operator on this basis.
inline Unitary2 dove_prism_pulse() {
    return Unitary2{0.0, 1.0, 1.0, 0.0};
}

enum class Scheme { kFree, kCpmg };

// Dynamical-decoupling schedule. FREE has no pulses; CPMG places pulse k of N
// at the fraction (2k-1)/(2N) of the fiber length, i.e. centered in each of N
// equal sub-intervals. Only even pulse counts are accepted so the output
// basis orientation matches the input.
struct ScheduleSpec {
    Scheme scheme = Scheme::kFree;
    int pulse_count = 0;

    static ScheduleSpec free_evolution() { return ScheduleSpec{Scheme::kFree, 0}; }
    static ScheduleSpec cpmg(int pulses) { return ScheduleSpec{Scheme::kCpmg, pulses}; }

    void validate() const {
        if (scheme == Scheme::kFree && pulse_count != 0) {
            throw std::invalid_argument("ScheduleSpec: FREE requires pulse_count = 0");
        }
        if (scheme == Scheme::kCpmg && (pulse_count < 2 || pulse_count % 2 != 0)) {
            throw std::invalid_argument("ScheduleSpec: CPMG requires an even pulse_count >= 2");
        }
    }
};

// Maps the CPMG pulse fractions to segment boundaries. Boundary b means "after
// b segments"; each pulse must land on a distinct interior boundary or the
// schedule cannot be realized on this segment grid.
inline std::vector<int> pulse_boundaries(const ScheduleSpec& schedule, int segments) {
    schedule.validate();
    if (segments < 1) throw std::invalid_argument("pulse_boundaries: segments must be >= 1");
    if (schedule.scheme == Scheme::kFree) return {};
    if (schedule.pulse_count > segments) {
        throw std::runtime_error("pulse_boundaries: more pulses than segments");
    }
    std::vector<int> boundaries;
    boundaries.reserve(static_cast<std::size_t>(schedule.pulse_count));
    const double n = static_cast<double>(segments);
    const double two_n_pulses = 2.0 * static_cast<double>(schedule.pulse_count);
    int previous = 0;
    for (int k = 1; k <= schedule.pulse_count; ++k) {
        const double position = n * static_cast<double>(2 * k - 1) / two_n_pulses;
        const int boundary = static_cast<int>(std::floor(position + 0.5));
        if (boundary < 1 || boundary > segments - 1 || boundary <= previous) {
            throw std::runtime_error(
                "pulse_boundaries: pulse positions cannot be mapped to distinct segment boundaries");
        }
        boundaries.push_back(boundary);
        previous = boundary;
    }
    return boundaries;
}

struct PropagationResult {
    StateVector2 final_state;
    double accumulated_phase = 0.0;  // signed sum of l * delta_phi_j, sign flipped by each pulse
};

// Incremental propagation engine: feed segment deltas one at a time; pulses
// fire when the walker crosses their boundary. A pulse at boundary b acts
// between segment b and segment b+1, so a snapshot taken after b segments
// does not include it.
class SegmentWalker {
public:
    SegmentWalker(const StateVector2& initial, int l, std::vector<int> boundaries)
        : state_(initial), l_(l), boundaries_(std::move(boundaries)) {}

    void step(double delta_phi) {
        if (next_boundary_ < boundaries_.size() &&
            boundaries_[next_boundary_] == segments_done_) {
            state_ = dove_prism_pulse().apply(state_);
            sign_ = -sign_;
            ++next_boundary_;
        }
        state_ = segment_operator(delta_phi, l_).apply(state_);
        accumulated_ += sign_ * static_cast<double>(l_) * delta_phi;
        ++segments_done_;
    }

    const StateVector2& state() const { return state_; }
    double accumulated_phase() const { return accumulated_; }
    int segments_done() const { return segments_done_; }
    int pulses_applied() const { return static_cast<int>(next_boundary_); }

private:
    StateVector2 state_;
    int l_;
    std::vector<int> boundaries_;
    std::size_t next_boundary_ = 0;
    int segments_done_ = 0;
    double sign_ = 1.0;
    double accumulated_ = 0.0;
};

// Applies the segment operators of one noise profile in order, inserting dove
// prisms at the schedule's boundaries.
inline PropagationResult propagate(const StateVector2& psi, const NoiseProfile& profile, int l,
                                   const ScheduleSpec& schedule) {
    const int n = static_cast<int>(profile.deltas.size());
    if (schedule.scheme == Scheme::kCpmg && schedule.pulse_count > n) {
        throw std::runtime_error("propagate: profile has fewer segments than pulses");
    }
    SegmentWalker walker(psi, l, pulse_boundaries(schedule, n));
    for (double delta : profile.deltas) walker.step(delta);
    return PropagationResult{walker.state(), walker.accumulated_phase()};
}

// Ensemble-averaged output state (1/T) sum_t |psi_out,t><psi_out,t| over a
// set of noise profiles. Reduction runs in ascending trial_id order so the
// result is bit-stable no matter how the profiles were produced.
inline DensityMatrix2 ensemble_density(const StateVector2& psi0,
                                       std::span<const NoiseProfile> profiles, int l,
                                       const ScheduleSpec& schedule) {
    if (profiles.empty()) {
        throw std::invalid_argument("ensemble_density: profile set must be nonempty");
    }
    const std::size_t n = profiles.front().deltas.size();
    for (const NoiseProfile& p : profiles) {
        if (p.deltas.size() != n) {
            throw std::invalid_argument("ensemble_density: profiles must share one FiberSpec");
        }
    }
    std::vector<std::size_t> order(profiles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return profiles[a].trial_id < profiles[b].trial_id;
    });

    double sum00 = 0.0, sum11 = 0.0;
    cdouble sum01{0.0, 0.0};
    for (std::size_t idx : order) {
        const StateVector2 out = propagate(psi0, profiles[idx], l, schedule).final_state;
        sum00 += std::norm(out.amp_plus);
        sum11 += std::norm(out.amp_minus);
        sum01 += out.amp_plus * std::conj(out.amp_minus);
    }
    const double inv = 1.0 / static_cast<double>(profiles.size());
    return DensityMatrix2(sum00 * inv, sum01 * inv, sum11 * inv);
}

}  // namespace oamsim
