#pragma once

// Closed-form figures of merit of the cyclically operated photon counter:
// conversion efficiency, qubit efficiency, spectral response, dark and thermal
// count rates, power sensitivity and detection bandwidth.

#include <cmath>
#include <stdexcept>

#include "smpd/constants.hpp"
#include "smpd/types.hpp"

namespace smpd {

/// Frequency-conversion efficiency 4C/(1+C)^2 of the pumped converter.
/// Unity at matched cooperativity C = 1.
[[nodiscard]] inline double eta_4wm(double cooperativity) {
    if (cooperativity < 0) throw std::domain_error("eta_4wm: cooperativity must be non-negative");
    const double c = cooperativity;
    return 4.0 * c / ((1.0 + c) * (1.0 + c));
}

/// Conversion efficiency reduced by buffer internal losses: only the externally
/// coupled fraction kappa_b_c / (kappa_b_c + kappa_b_i) of converted photons is
/// useful. Model choice; the lossless form is used by eta_smpd.
[[nodiscard]] inline double eta_4wm_with_losses(double cooperativity, double kappa_b_c,
                                                double kappa_b_i) {
    if (kappa_b_c <= 0) throw std::domain_error("eta_4wm_with_losses: kappa_b_c must be positive");
    if (kappa_b_i < 0) throw std::domain_error("eta_4wm_with_losses: kappa_b_i must be non-negative");
    return eta_4wm(cooperativity) * kappa_b_c / (kappa_b_c + kappa_b_i);
}

/// Probability that a qubit excitation created during the detection window is
/// still present at readout: (t1/t_d)(1 - exp(-t_d/t1)).
[[nodiscard]] inline double eta_q(double t_d, double t1) {
    if (t_d <= 0 || t1 <= 0) throw std::domain_error("eta_q: t_d and t1 must be positive");
    const double u = t_d / t1;
    return (1.0 - std::exp(-u)) / u;
}

/// Lorentzian spectral response 1 / (1 + [2(omega - omega_b)/kappa_d]^2).
[[nodiscard]] inline double eta_omega(double omega, double omega_b, double kappa_d) {
    if (kappa_d <= 0) throw std::domain_error("eta_omega: kappa_d must be positive");
    const double x = 2.0 * (omega - omega_b) / kappa_d;
    return 1.0 / (1.0 + x * x);
}

/// Detection bandwidth (FWHM of the converter frequency response), rad/s.
/// Reduces to sqrt(2) kappa_b for kappa_b = kappa_w and to ~2 kappa_b for
/// kappa_b << kappa_w.
[[nodiscard]] inline double detection_bandwidth(double kappa_b, double kappa_w) {
    if (kappa_b <= 0 || kappa_w <= 0)
        throw std::domain_error("detection_bandwidth: linewidths must be positive");
    const double q = (kappa_b - kappa_w) / 2.0;
    const double q2 = q * q;
    return std::sqrt(2.0) *
           std::sqrt(std::sqrt(kappa_b * kappa_b * kappa_w * kappa_w + q2 * q2) - q2);
}

/// Overall detection efficiency at signal frequency omega, with the factor
/// breakdown reported in the returned FigureOfMerit (rates are left at zero).
/// kappa_d_override > 0 uses the given detection bandwidth instead of the one
/// derived from the device linewidths.
[[nodiscard]] inline FigureOfMerit eta_smpd(const DeviceParams& device, const TuningState& tuning,
                                            const CycleTiming& timing, double omega,
                                            double kappa_d_override = 0.0) {
    device.validate();
    tuning.validate(device);
    timing.validate();
    FigureOfMerit fom;
    fom.kappa_d = kappa_d_override > 0 ? kappa_d_override
                                       : detection_bandwidth(device.kappa_b(), device.kappa_w);
    fom.eta_omega = eta_omega(omega, device.omega_b, fom.kappa_d);
    fom.eta_4wm = eta_4wm(tuning.cooperativity);
    fom.eta_q = eta_q(timing.t_d, device.t1);
    fom.eta_cycle = timing.duty_cycle();
    fom.eta_smpd = fom.eta_omega * fom.eta_4wm * fom.eta_q * device.f_ro * fom.eta_cycle;
    return fom;
}

/// False-positive rate from qubit relaxation toward thermal equilibrium,
/// p_th_q (t_d/t1) / (t_d + t_ro + t_reset), assuming an ideal active reset.
[[nodiscard]] inline double alpha_q_rate(double p_th_q, const CycleTiming& timing, double t1) {
    if (p_th_q < 0 || p_th_q >= 0.5) throw std::domain_error("alpha_q_rate: p_th_q out of range");
    if (t1 <= 0) throw std::domain_error("alpha_q_rate: t1 must be positive");
    const double cycle = timing.cycle_duration();
    if (cycle <= 0) throw std::domain_error("alpha_q_rate: cycle duration must be positive");
    return p_th_q * (timing.t_d / t1) / cycle;
}

/// Coefficient K_q = (t_d/t1) / cycle duration multiplying p_th_q above, s^-1.
[[nodiscard]] inline double alpha_q_coefficient(const CycleTiming& timing, double t1) {
    if (t1 <= 0) throw std::domain_error("alpha_q_coefficient: t1 must be positive");
    const double cycle = timing.cycle_duration();
    if (cycle <= 0) throw std::domain_error("alpha_q_coefficient: cycle duration must be positive");
    return (timing.t_d / t1) / cycle;
}

/// Bose-Einstein occupation 1/(exp(hbar omega / kB T) - 1).
[[nodiscard]] inline double bose_einstein(double omega, double temperature) {
    if (temperature <= 0) throw std::domain_error("bose_einstein: temperature must be positive");
    if (omega <= 0) throw std::domain_error("bose_einstein: omega must be positive");
    return 1.0 / std::expm1(constants::hbar * omega / (constants::boltzmann_k * temperature));
}

/// Temperature at which a mode at omega holds occupation n_bar.
[[nodiscard]] inline double temperature_from_occupation(double omega, double n_bar) {
    if (n_bar <= 0) throw std::domain_error("temperature_from_occupation: n_bar must be positive");
    if (omega <= 0) throw std::domain_error("temperature_from_occupation: omega must be positive");
    return constants::hbar * omega / (constants::boltzmann_k * std::log1p(1.0 / n_bar));
}

/// Thermal count rate n_bar kappa_d eta / 4 from the flux of thermal photons
/// accepted within the detection band; eta is the on-resonance efficiency.
/// Equals the Lorentzian-response integral over the photon flux density
/// n_bar domega/2pi for kappa_d << omega_b.
[[nodiscard]] inline double alpha_th_rate(double n_th_b, double kappa_d,
                                          double eta_smpd_at_resonance) {
    if (n_th_b < 0) throw std::domain_error("alpha_th_rate: n_th_b must be non-negative");
    if (kappa_d < 0) throw std::domain_error("alpha_th_rate: kappa_d must be non-negative");
    if (eta_smpd_at_resonance < 0)
        throw std::domain_error("alpha_th_rate: efficiency must be non-negative");
    return n_th_b * kappa_d * eta_smpd_at_resonance / 4.0;
}

/// Power sensitivity hbar omega_b sqrt(alpha) / eta, W/sqrt(Hz): the power
/// detected with unit signal-to-noise ratio in one second of integration.
[[nodiscard]] inline double sensitivity(double eta_smpd, double alpha_total, double omega_b) {
    if (eta_smpd <= 0 || eta_smpd > 1) throw std::domain_error("sensitivity: eta must lie in (0,1]");
    if (alpha_total < 0) throw std::domain_error("sensitivity: alpha must be non-negative");
    if (omega_b <= 0) throw std::domain_error("sensitivity: omega_b must be positive");
    return constants::hbar * omega_b * std::sqrt(alpha_total) / eta_smpd;
}

/// Full analytic figure-of-merit report at signal frequency omega: efficiency
/// breakdown, dark/thermal rate budget and resulting sensitivity.
[[nodiscard]] inline FigureOfMerit figures_of_merit(const DeviceParams& device,
                                                    const TuningState& tuning,
                                                    const CycleTiming& timing,
                                                    const NoiseEnvironment& noise, double omega,
                                                    double kappa_d_override = 0.0) {
    noise.validate();
    FigureOfMerit fom = eta_smpd(device, tuning, timing, omega, kappa_d_override);
    const double p_th = noise.qubit_temperature > 0
                            ? bose_einstein(device.omega_q, noise.qubit_temperature)
                            : device.p_th_q;
    const double n_th = bose_einstein(device.omega_b, noise.field_temperature);
    const double eta_resonance = fom.eta_smpd / fom.eta_omega;
    fom.alpha_q = alpha_q_rate(p_th, timing, device.t1);
    fom.alpha_p = noise.alpha_p;
    fom.alpha_th = alpha_th_rate(n_th, fom.kappa_d, eta_resonance);
    fom.alpha_err = fom.alpha_q + fom.alpha_p;
    fom.alpha_total = fom.alpha_err + fom.alpha_th;
    fom.sensitivity = sensitivity(fom.eta_smpd, fom.alpha_total, device.omega_b);
    return fom;
}

}  // namespace smpd
