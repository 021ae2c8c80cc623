#pragma once

// Value types describing the detector: static device constants, the flux/pump
// operating point, cycle timing and the noise environment. All of them are
// plain aggregates; validate() throws std::invalid_argument with the name of
// the offending field.

#include <cmath>
#include <stdexcept>
#include <string>

#include "smpd/constants.hpp"

namespace smpd {

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail

// =============================================================================
// DeviceParams — static device constants
// =============================================================================

struct DeviceParams {
    // Mode frequencies, rad/s.
    double omega_b = from_ghz(7.7);     // buffer
    double omega_w = from_ghz(8.475);   // waste
    double omega_q = from_ghz(6.533);   // qubit
    double omega_pb = from_ghz(7.78);   // buffer Purcell filter
    double omega_pw = from_ghz(8.39);   // waste Purcell filter

    // Energy decay rates, rad/s.
    double kappa_b_c = from_khz(134.986);  // buffer external coupling
    double kappa_b_i = from_khz(35.014);   // buffer internal losses (2.2e5 s^-1)
    double kappa_w = from_mhz(1.75);
    double kappa_pb = from_mhz(20.0);
    double kappa_pw = from_mhz(400.0);

    // Dispersive shifts, rad/s.
    double chi_b = from_mhz(3.5);
    double chi_w = from_mhz(16.0);

    // Qubit coherence and readout.
    double t1 = 70e-6;        // s
    double t2_star = 20e-6;   // s
    double f_ro = 0.87;       // readout fidelity, (0,1]
    double p_th_q = 8.5e-4;   // equilibrium excited-state population

    /// Total buffer linewidth, rad/s.
    [[nodiscard]] double kappa_b() const { return kappa_b_c + kappa_b_i; }

    void validate() const {
        using detail::require;
        require(omega_b > 0, "omega_b must be positive");
        require(omega_w > 0, "omega_w must be positive");
        require(omega_q > 0, "omega_q must be positive");
        require(omega_pb > 0, "omega_pb must be positive");
        require(omega_pw > 0, "omega_pw must be positive");
        require(kappa_b_c > 0, "kappa_b_c must be positive");
        require(kappa_b_i >= 0, "kappa_b_i must be non-negative");
        require(kappa_w > 0, "kappa_w must be positive");
        require(kappa_pb > 0, "kappa_pb must be positive");
        require(kappa_pw > 0, "kappa_pw must be positive");
        require(chi_b > 0, "chi_b must be positive");
        require(chi_w > 0, "chi_w must be positive");
        require(t1 > 0, "t1 must be positive");
        require(t2_star > 0, "t2_star must be positive");
        require(f_ro > 0 && f_ro <= 1, "f_ro must lie in (0,1]");
        require(p_th_q >= 0 && p_th_q < 0.5, "p_th_q must lie in [0,0.5)");
    }
};

// =============================================================================
// TuningState — flux biases and pump operating point
// =============================================================================

struct TuningState {
    double phi_b = 0.0;        // buffer SQUID flux bias, Phi0 units
    double phi_pb = 0.0;       // Purcell SQUID flux bias, Phi0 units
    double xi0 = 0.0;          // pump amplitude, dimensionless drive units
    double delta_p = 0.0;      // pump detuning from the mixing condition, rad/s
    double cooperativity = 1.0;

    /// Effective parametric coupling sqrt(chi_b chi_w) * xi0, rad/s.
    [[nodiscard]] double g_4wm(const DeviceParams& d) const {
        return std::sqrt(d.chi_b * d.chi_w) * xi0;
    }

    /// Cooperativity implied by the pump amplitude, 4 chi_b chi_w xi0^2 / (kappa_w kappa_b).
    [[nodiscard]] double cooperativity_from_xi0(const DeviceParams& d) const {
        return 4.0 * d.chi_b * d.chi_w * xi0 * xi0 / (d.kappa_w * d.kappa_b());
    }

    /// Pump amplitude that realizes cooperativity c on device d.
    [[nodiscard]] static double xi0_for_cooperativity(double c, const DeviceParams& d) {
        return std::sqrt(c * d.kappa_w * d.kappa_b() / (4.0 * d.chi_b * d.chi_w));
    }

    void validate(const DeviceParams& d) const {
        detail::require(cooperativity >= 0, "cooperativity must be non-negative");
        if (xi0 > 0) {
            const double implied = cooperativity_from_xi0(d);
            detail::require(std::abs(implied - cooperativity) <=
                                1e-3 * std::max(1.0, cooperativity),
                            "cooperativity inconsistent with xi0");
        }
    }
};

// =============================================================================
// CycleTiming
// =============================================================================

struct CycleTiming {
    double t_d = 15e-6;          // detection window, s
    double t_ro = 0.8e-6;        // readout, s
    double t_reset_unit = 0.8e-6;  // one conditional reset round, s
    double mean_resets_per_cycle = 0.0;

    /// Average duty cycle t_d / (t_d + t_ro + mean_resets * t_reset_unit).
    [[nodiscard]] double duty_cycle() const {
        return t_d / (t_d + t_ro + mean_resets_per_cycle * t_reset_unit);
    }

    /// Average cycle duration, s.
    [[nodiscard]] double cycle_duration() const {
        return t_d + t_ro + mean_resets_per_cycle * t_reset_unit;
    }

    /// True when the detection window is short compared to the qubit lifetime.
    /// Longer windows still run, but efficiency degrades.
    [[nodiscard]] bool window_shorter_than(double t1) const { return t_d < t1; }

    void validate() const {
        using detail::require;
        require(t_d > 0, "t_d must be positive");
        require(t_ro >= 0, "t_ro must be non-negative");
        require(t_reset_unit >= 0, "t_reset_unit must be non-negative");
        require(mean_resets_per_cycle >= 0, "mean_resets_per_cycle must be non-negative");
        const double duty = duty_cycle();
        require(duty > 0 && duty < 1.0 + 1e-12, "duty cycle must lie in (0,1]");
    }
};

// =============================================================================
// NoiseEnvironment
// =============================================================================

struct NoiseEnvironment {
    double field_temperature = 0.040;   // effective input-field temperature, K
    double qubit_temperature = 0.0;     // effective qubit temperature, K (0 = use p_th_q)
    double cryostat_temperature = 0.010;  // cryostat base temperature, K
    double alpha_p = 2.0;               // pump-induced heating click rate, s^-1

    void validate() const {
        using detail::require;
        require(field_temperature >= 0, "field_temperature must be non-negative");
        require(qubit_temperature >= 0, "qubit_temperature must be non-negative");
        require(cryostat_temperature >= 0, "cryostat_temperature must be non-negative");
        require(alpha_p >= 0, "alpha_p must be non-negative");
    }
};

// =============================================================================
// FigureOfMerit — analytic performance summary
// =============================================================================

struct FigureOfMerit {
    double eta_smpd = 0.0;  // overall detection efficiency at the probed frequency
    double eta_omega = 0.0;
    double eta_4wm = 0.0;
    double eta_q = 0.0;
    double eta_cycle = 0.0;

    double alpha_q = 0.0;      // qubit thermal dark counts, s^-1
    double alpha_p = 0.0;      // pump heating dark counts, s^-1
    double alpha_th = 0.0;     // thermal photon counts, s^-1
    double alpha_err = 0.0;    // alpha_q + alpha_p
    double alpha_total = 0.0;  // alpha_err + alpha_th

    double sensitivity = 0.0;  // W/sqrt(Hz)
    double kappa_d = 0.0;      // detection bandwidth, rad/s
};

}  // namespace smpd
