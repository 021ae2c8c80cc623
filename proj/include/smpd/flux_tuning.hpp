#pragma once

// Flux-tuning models: SQUID-tunable buffer and Purcell resonators and the
// Purcell-filtered buffer coupling rate.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smpd/constants.hpp"

namespace smpd {

enum class SquidModelKind {
    sinusoidal_approx,  // omega_mean + amplitude * cos(2 pi (phi - offset))
    squid_exact,        // omega_max * (cos^2(pi phi) + d^2 sin^2(pi phi))^(1/4)
};

/// Flux dependence of a SQUID-tuned resonator. For squid_exact the junction
/// asymmetry d = (r-1)/(r+1) (r the critical-current ratio) sets the modulation
/// depth, omega_min/omega_max = sqrt(d). The narrow-range buffer is described
/// by the sinusoidal approximation in practice; both agree to within ~1.3% of
/// the tuning range at d = 0.875.
struct SquidTuningModel {
    double omega_max = 0.0;   // rad/s; mean frequency for the sinusoidal kind
    double asymmetry = 0.0;   // d in [0,1]
    double flux_offset = 0.0; // Phi0 units
    SquidModelKind kind = SquidModelKind::squid_exact;
    double amplitude = 0.0;   // rad/s; sinusoidal kind only

    void validate() const {
        if (omega_max <= 0) throw std::invalid_argument("omega_max must be positive");
        if (asymmetry < 0 || asymmetry > 1) throw std::invalid_argument("asymmetry must lie in [0,1]");
        if (kind == SquidModelKind::sinusoidal_approx && amplitude < 0)
            throw std::invalid_argument("amplitude must be non-negative");
    }

    [[nodiscard]] static double asymmetry_from_junction_ratio(double r) {
        if (r < 1) throw std::invalid_argument("junction ratio must be >= 1");
        return (r - 1.0) / (r + 1.0);
    }
    [[nodiscard]] static double junction_ratio_from_asymmetry(double d) {
        if (d < 0 || d >= 1) throw std::invalid_argument("asymmetry must lie in [0,1)");
        return (1.0 + d) / (1.0 - d);
    }
};

/// Resonator frequency at flux bias phi (Phi0 units). Periodic in Phi0, maximum
/// at the flux offset.
[[nodiscard]] inline double buffer_frequency(double phi, const SquidTuningModel& model) {
    model.validate();
    const double x = phi - model.flux_offset;
    if (model.kind == SquidModelKind::sinusoidal_approx) {
        // mean + A cos(2 pi x) with the mean chosen so the extremum at the
        // flux offset equals omega_max: omega(phi) in [omega_max - 2A, omega_max].
        return model.omega_max - model.amplitude * (1.0 - std::cos(constants::two_pi * x));
    }
    const double c = std::cos(std::numbers::pi * x);
    const double s = std::sin(std::numbers::pi * x);
    const double d = model.asymmetry;
    return model.omega_max * std::pow(c * c + d * d * s * s, 0.25);
}

struct PurcellFrequency {
    double omega = 0.0;   // rad/s, clipped to the calibrated range
    bool collapsed = false;  // raw frequency collapsed at half-integer flux
};

/// Symmetric-SQUID Purcell filter frequency omega_max sqrt(|cos(pi phi)|),
/// clipped to the calibrated tuning interval [omega_lo, omega_hi]. At exactly
/// half-integer flux the raw frequency collapses; the result is clipped and
/// flagged.
[[nodiscard]] inline PurcellFrequency purcell_frequency(double phi, double omega_max,
                                                        double omega_lo = from_ghz(7.26),
                                                        double omega_hi = from_ghz(7.78)) {
    if (omega_max <= 0) throw std::invalid_argument("omega_max must be positive");
    if (omega_lo > omega_hi) throw std::invalid_argument("invalid clip range");
    const double c = std::abs(std::cos(std::numbers::pi * phi));
    PurcellFrequency out;
    out.collapsed = c < 1e-12;
    out.omega = std::min(omega_hi, std::max(omega_lo, omega_max * std::sqrt(c)));
    return out;
}

/// Purcell-filtered buffer coupling: kappa_b_c(Delta) = kappa_pb g^2 /
/// (Delta^2 + (kappa_pb/2)^2), Delta the buffer-Purcell detuning. Standard
/// filtered-decay form; maximum 4 g^2 / kappa_pb on resonance.
struct PurcellCouplingModel {
    double g_pb = 0.0;      // buffer-Purcell coupling, rad/s
    double kappa_pb = 0.0;  // Purcell linewidth, rad/s
    double kappa_b_i = 0.0; // buffer internal losses, rad/s

    void validate() const {
        if (g_pb <= 0) throw std::invalid_argument("g_pb must be positive");
        if (kappa_pb <= 0) throw std::invalid_argument("kappa_pb must be positive");
        if (kappa_b_i < 0) throw std::invalid_argument("kappa_b_i must be non-negative");
    }

    /// Calibrate g_pb from the on-resonance maximum coupling rate.
    [[nodiscard]] static PurcellCouplingModel from_max_rate(double max_rate, double kappa_pb,
                                                            double kappa_b_i = 0.0) {
        PurcellCouplingModel m;
        m.kappa_pb = kappa_pb;
        m.kappa_b_i = kappa_b_i;
        m.g_pb = std::sqrt(max_rate * kappa_pb) / 2.0;
        m.validate();
        return m;
    }
};

[[nodiscard]] inline double kappa_bc_of_detuning(double delta, const PurcellCouplingModel& model) {
    model.validate();
    const double half = model.kappa_pb / 2.0;
    return model.kappa_pb * model.g_pb * model.g_pb / (delta * delta + half * half);
}

}  // namespace smpd
