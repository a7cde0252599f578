#pragma once

#include <cmath>
#include <stdexcept>

#include "oamsim/qstate.hpp"

namespace oamsim {

// Parameters of the closed-form dephasing model. n counts fiber segments (it
// is proportional to the propagated distance, so only products like n*l are
// observable); phi0 is the deterministic per-segment phase, dphi2 the
// variance of the shared stochastic phase deviation, and theta the azimuthal
// phase of the input superposition.
struct AnalyticParams {
    double n = 0.0;
    int l = 1;
    double phi0 = 0.0;
    double dphi2 = 0.0;
    double theta = 0.0;

    void validate() const {
        if (n < 0.0) throw std::invalid_argument("AnalyticParams: n must be nonnegative");
        if (dphi2 < 0.0) throw std::invalid_argument("AnalyticParams: dphi2 must be nonnegative");
    }
};

// Off-diagonal decay factor exp(-n^2 l^2 dphi2 / 2): the second-order
// (Gaussian) truncation of the averaged random phase factor. Equals 1 only
// when the exponent vanishes.
inline double decoherence_factor(const AnalyticParams& params) {
    params.validate();
    const double nl = params.n * std::abs(static_cast<double>(params.l));
    return std::exp(-0.5 * nl * nl * params.dphi2);
}

// Ensemble-averaged output state: diagonal 1/2, off-diagonal
// (1/2) e^{i l (2 theta + n phi0)} times the decay factor.
inline DensityMatrix2 analytic_rho_out(const AnalyticParams& params) {
    params.validate();
    const double phase = static_cast<double>(params.l) * (2.0 * params.theta + params.n * params.phi0);
    const double magnitude = 0.5 * decoherence_factor(params);
    return DensityMatrix2(0.5, std::polar(magnitude, phase), 0.5);
}

// Fidelity of the input superposition against analytic_rho_out:
// F = (1 + cos(n l phi0) * decay) / 2.
inline double analytic_fidelity(const AnalyticParams& params) {
    params.validate();
    const double drift = params.n * static_cast<double>(params.l) * params.phi0;
    return 0.5 * (1.0 + std::cos(drift) * decoherence_factor(params));
}

}  // namespace oamsim
