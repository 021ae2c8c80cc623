#pragma once

// Photon-number calibration using the qubit as a power meter: an intra-cavity
// field of mean photon number |eps|^2 shifts the Ramsey fringe frequency by
// Delta_q and adds dephasing Gamma_q, both linear in |eps|^2. Inverting the
// relation calibrates the photon flux at the buffer input.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace smpd {

struct RamseyShift {
    double delta_q = 0.0;  // fringe frequency shift, rad/s
    double gamma_q = 0.0;  // induced dephasing rate, s^-1
};

/// Delta_q + i Gamma_q = -4 chi_b |eps|^2 / ((kappa_b + i chi_b)^2 + 4 delta^2).
[[nodiscard]] inline RamseyShift ramsey_shift(double eps_squared, double delta, double chi_b,
                                              double kappa_b) {
    if (chi_b <= 0 || kappa_b <= 0) throw std::domain_error("ramsey_shift: chi_b and kappa_b must be positive");
    if (eps_squared < 0) throw std::domain_error("ramsey_shift: photon number must be non-negative");
    const std::complex<double> pole(kappa_b, chi_b);
    const std::complex<double> z = -4.0 * chi_b * eps_squared / (pole * pole + 4.0 * delta * delta);
    return {z.real(), z.imag()};
}

/// Closed-form inversion of ramsey_shift for |eps|^2. The measured pair must
/// be phase-consistent with the model; a relative imaginary remainder larger
/// than phase_tolerance is rejected.
[[nodiscard]] inline double photon_number_from_ramsey(const RamseyShift& shift, double delta,
                                                      double chi_b, double kappa_b,
                                                      double phase_tolerance = 1e-3) {
    if (chi_b <= 0 || kappa_b <= 0)
        throw std::domain_error("photon_number_from_ramsey: chi_b and kappa_b must be positive");
    const std::complex<double> pole(kappa_b, chi_b);
    const std::complex<double> measured(shift.delta_q, shift.gamma_q);
    const std::complex<double> eps2 = -measured * (pole * pole + 4.0 * delta * delta) / (4.0 * chi_b);
    const double scale = std::abs(eps2);
    if (scale == 0.0) return 0.0;
    if (std::abs(eps2.imag()) > phase_tolerance * scale)
        throw std::runtime_error("photon_number_from_ramsey: shift pair inconsistent with model phase");
    if (eps2.real() < 0)
        throw std::runtime_error("photon_number_from_ramsey: negative photon number implied");
    return eps2.real();
}

/// Input photon flux implied by a measured Ramsey pair: inverts for |eps|^2,
/// then applies the steady-state input-output relation flux = kappa_b_c |eps|^2.
[[nodiscard]] inline double photon_flux_from_ramsey(const RamseyShift& shift, double delta,
                                                    double chi_b, double kappa_b,
                                                    double kappa_b_c,
                                                    double phase_tolerance = 1e-3) {
    if (kappa_b_c <= 0) throw std::domain_error("photon_flux_from_ramsey: kappa_b_c must be positive");
    return kappa_b_c * photon_number_from_ramsey(shift, delta, chi_b, kappa_b, phase_tolerance);
}

/// Intra-cavity photon number sustained by a given input flux (the forward
/// direction of the calibration).
[[nodiscard]] inline double photon_number_from_flux(double flux, double kappa_b_c) {
    if (kappa_b_c <= 0) throw std::domain_error("photon_number_from_flux: kappa_b_c must be positive");
    if (flux < 0) throw std::domain_error("photon_number_from_flux: flux must be non-negative");
    return flux / kappa_b_c;
}

}  // namespace smpd
