#pragma once

// Two-coupled-cavity transmission of the pumped converter as a function of
// signal detuning delta = omega - omega_b and pump detuning delta_p from the
// mixing condition omega_4wm = omega_q + omega_w - chi_w - omega_b.

#include <complex>
#include <stdexcept>

#include "smpd/types.hpp"

namespace smpd {

/// |S|^2 = 4C / |1 + C - 4 d(d+dp)/(kb kw) + 2i d/kb + 2i (d+dp)/kw|^2.
/// Peaks at d = dp = 0 with value 4C/(1+C)^2 for C <= 1.
[[nodiscard]] inline double s_4wm(double delta, double delta_p, double cooperativity,
                                  double kappa_b, double kappa_w) {
    if (kappa_b <= 0 || kappa_w <= 0) throw std::domain_error("s_4wm: linewidths must be positive");
    if (cooperativity < 0) throw std::domain_error("s_4wm: cooperativity must be non-negative");
    const std::complex<double> denom(1.0 + cooperativity -
                                         4.0 * delta * (delta + delta_p) / (kappa_b * kappa_w),
                                     2.0 * delta / kappa_b + 2.0 * (delta + delta_p) / kappa_w);
    return 4.0 * cooperativity / std::norm(denom);
}

/// Conversion response surface at a fixed operating point.
struct FourWaveMixingSurface {
    double cooperativity = 1.0;
    double kappa_b = 0.0;   // rad/s
    double kappa_w = 0.0;   // rad/s
    double omega_4wm = 0.0; // pump matching frequency, rad/s

    [[nodiscard]] double operator()(double delta, double delta_p) const {
        return s_4wm(delta, delta_p, cooperativity, kappa_b, kappa_w);
    }

    [[nodiscard]] double peak() const { return s_4wm(0.0, 0.0, cooperativity, kappa_b, kappa_w); }
};

/// Pump frequency satisfying the mixing condition for the given device.
[[nodiscard]] inline double omega_4wm_condition(const DeviceParams& d) {
    return d.omega_q + d.omega_w - d.chi_w - d.omega_b;
}

}  // namespace smpd
