#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace oamsim {

using cdouble = std::complex<double>;

// Tolerances that are part of the public contract.
inline constexpr double kNormTol = 1e-12;     // state normalization
inline constexpr double kTraceTol = 1e-12;    // density-matrix trace
inline constexpr double kEigenTol = 1e-12;    // positive-semidefiniteness slack
inline constexpr double kImagTol = 1e-9;      // imaginary residue of quadratic forms

// Two-level state on the basis {|+l>, |-l>}. Plain value type; the named
// constructors below produce unit-norm states, unitary application preserves
// the norm up to rounding.
struct StateVector2 {
    cdouble amp_plus{1.0, 0.0};   // amplitude of |+l>
    cdouble amp_minus{0.0, 0.0};  // amplitude of |-l>

    double norm_sq() const { return std::norm(amp_plus) + std::norm(amp_minus); }
    double norm() const { return std::sqrt(norm_sq()); }
};

inline cdouble inner_product(const StateVector2& bra, const StateVector2& ket) {
    return std::conj(bra.amp_plus) * ket.amp_plus + std::conj(bra.amp_minus) * ket.amp_minus;
}

// Equal superposition of +l and -l with relative phase set by the azimuthal
// angle phi: (e^{i l phi}, e^{-i l phi})/sqrt(2). l = 0 has no mode pair.
inline StateVector2 make_superposition_state(int l, double phi) {
    if (l == 0) {
        throw std::invalid_argument("make_superposition_state: l must be nonzero");
    }
    const double angle = static_cast<double>(l) * phi;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    return StateVector2{std::polar(inv_sqrt2, angle), std::polar(inv_sqrt2, -angle)};
}

// 2x2 density matrix, Hermitian by construction: the diagonal is stored as
// reals and rho10 is the conjugate of rho01. The constructor enforces unit
// trace and positive semidefiniteness within the contract tolerances.
class DensityMatrix2 {
public:
    DensityMatrix2(double rho00, cdouble rho01, double rho11)
        : rho00_(rho00), rho11_(rho11), rho01_(rho01) {
        if (std::abs(rho00_ + rho11_ - 1.0) > kTraceTol) {
            throw std::invalid_argument("DensityMatrix2: trace differs from 1 beyond 1e-12");
        }
        if (min_eigenvalue() < -kEigenTol) {
            throw std::invalid_argument("DensityMatrix2: negative eigenvalue beyond 1e-12");
        }
    }

    cdouble rho00() const { return {rho00_, 0.0}; }
    cdouble rho01() const { return rho01_; }
    cdouble rho10() const { return std::conj(rho01_); }
    cdouble rho11() const { return {rho11_, 0.0}; }

    double trace() const { return rho00_ + rho11_; }
    double determinant() const { return rho00_ * rho11_ - std::norm(rho01_); }
    double purity() const { return rho00_ * rho00_ + rho11_ * rho11_ + 2.0 * std::norm(rho01_); }

    double min_eigenvalue() const {
        const double mid = 0.5 * (rho00_ + rho11_);
        const double half_gap = 0.5 * (rho00_ - rho11_);
        return mid - std::sqrt(half_gap * half_gap + std::norm(rho01_));
    }
    double max_eigenvalue() const {
        const double mid = 0.5 * (rho00_ + rho11_);
        const double half_gap = 0.5 * (rho00_ - rho11_);
        return mid + std::sqrt(half_gap * half_gap + std::norm(rho01_));
    }

private:
    double rho00_, rho11_;
    cdouble rho01_;
};

// Rank-1 projector |psi><psi| of a normalized state.
inline DensityMatrix2 density_from_state(const StateVector2& psi) {
    return DensityMatrix2(std::norm(psi.amp_plus), psi.amp_plus * std::conj(psi.amp_minus),
                          std::norm(psi.amp_minus));
}

// F = <psi| rho |psi>. The quadratic form of a Hermitian matrix is real up to
// rounding; an imaginary residue above 1e-9 signals a broken invariant and is
// reported, below that it is asserted and dropped.
inline double fidelity(const StateVector2& psi, const DensityMatrix2& rho) {
    const cdouble a = psi.amp_plus;
    const cdouble b = psi.amp_minus;
    const cdouble form = std::conj(a) * (rho.rho00() * a + rho.rho01() * b) +
                         std::conj(b) * (rho.rho10() * a + rho.rho11() * b);
    if (std::abs(form.imag()) > kImagTol) {
        throw std::runtime_error("fidelity: quadratic form has imaginary part above 1e-9");
    }
    const double value = form.real();
    if (value < 0.0) return 0.0;
    if (value > 1.0) return 1.0;
    return value;
}

namespace detail {

// Associated Laguerre polynomial L_p^alpha(x) by the standard three-term
// recurrence; stable for the small p used here.
inline double assoc_laguerre(int p, int alpha, double x) {
    if (p == 0) return 1.0;
    double prev = 1.0;
    double curr = 1.0 + static_cast<double>(alpha) - x;
    for (int k = 1; k < p; ++k) {
        const double next =
            ((static_cast<double>(2 * k + 1 + alpha) - x) * curr - static_cast<double>(k + alpha) * prev) /
            static_cast<double>(k + 1);
        prev = curr;
        curr = next;
    }
    return curr;
}

}  // namespace detail

// Laguerre-Gauss mode geometry. p is the radial index, l the azimuthal index;
// waist and wavenumber fix the Rayleigh range z_R = k w0^2 / 2, and z is the
// propagation distance at which the radial profile is evaluated.
struct LGModeParams {
    int p = 0;
    int l = 0;
    double waist = 1.0;       // w0
    double wavenumber = 1.0;  // k
    double z = 0.0;

    LGModeParams(int p_, int l_, double waist_, double wavenumber_, double z_)
        : p(p_), l(l_), waist(waist_), wavenumber(wavenumber_), z(z_) {
        if (p < 0) throw std::invalid_argument("LGModeParams: p must be nonnegative");
        if (!(waist > 0.0)) throw std::invalid_argument("LGModeParams: waist must be positive");
        if (!(wavenumber > 0.0)) throw std::invalid_argument("LGModeParams: wavenumber must be positive");
    }

    double rayleigh_range() const { return 0.5 * wavenumber * waist * waist; }
    double beam_width() const {
        const double ratio = z / rayleigh_range();
        return waist * std::sqrt(1.0 + ratio * ratio);
    }
    // Radius of wavefront curvature R(z) = z (1 + (z_R/z)^2); infinite at z=0.
    bool flat_wavefront() const { return z == 0.0; }
    double curvature_radius() const {
        const double ratio = rayleigh_range() / z;
        return z * (1.0 + ratio * ratio);
    }
    double gouy_phase() const {
        return static_cast<double>(2 * p + std::abs(l) + 1) * std::atan(z / rayleigh_range());
    }
};

// Radial profile R_{p,l}(r) of the Laguerre-Gauss mode, including the
// Gaussian envelope, the wavefront-curvature phase e^{i k r^2 / (2 R(z))}
// (taken as 1 on the flat wavefront at z=0) and the Gouy phase. The constant
// A is fixed by unit L2 norm of the profile: integral |R|^2 r dr = 1.
inline cdouble lg_radial(const LGModeParams& mode, double r) {
    if (r < 0.0) throw std::invalid_argument("lg_radial: r must be nonnegative");
    const int abs_l = std::abs(mode.l);
    const double w = mode.beam_width();

    // A = 2 sqrt(p! / (p+|l|)!)
    double factorial_ratio = 1.0;
    for (int i = mode.p + 1; i <= mode.p + abs_l; ++i) factorial_ratio /= static_cast<double>(i);
    const double norm_const = 2.0 * std::sqrt(factorial_ratio);

    const double arg = 2.0 * r * r / (w * w);
    const double radial = (norm_const / w) * std::pow(std::numbers::sqrt2 * r / w, abs_l) *
                          detail::assoc_laguerre(mode.p, abs_l, arg) * std::exp(-r * r / (w * w));

    double phase = mode.gouy_phase();
    if (!mode.flat_wavefront()) {
        phase += mode.wavenumber * r * r / (2.0 * mode.curvature_radius());
    }
    return radial * cdouble{std::cos(phase), std::sin(phase)};
}

// Dimension of the qudit alphabet spanned by radial indices up to p_max and
// azimuthal order pairs up to l_max: d = 2 * [p(p+1)/2] * [l(l+1)/2].
inline std::int64_t qudit_dimension(int p_max, int l_max) {
    if (p_max < 1 || l_max < 1) {
        throw std::invalid_argument("qudit_dimension: p_max and l_max must be at least 1");
    }
    const std::int64_t p_states = static_cast<std::int64_t>(p_max) * (p_max + 1) / 2;
    const std::int64_t l_states = static_cast<std::int64_t>(l_max) * (l_max + 1) / 2;
    return 2 * p_states * l_states;
}

inline double bits_per_photon(int p_max, int l_max) {
    return std::log2(static_cast<double>(qudit_dimension(p_max, l_max)));
}

}  // namespace oamsim
