#pragma once

// Test-only oracles, kept independent of the implementation paths they check:
// numeric quadrature for the thermal-rate integral, numeric root-finding for
// the response FWHM, and brute-force grid search for the optimizer.

#include <cmath>
#include <functional>

#include "smpd/fwm_response.hpp"
#include "smpd/optimize.hpp"

namespace oracles {

/// Integral of n * eta(omega) over the photon flux density d omega / 2 pi with
/// eta a Lorentzian of FWHM kappa_d centered at omega_b. Uses the tangent
/// substitution delta = (kappa_d/2) tan(theta), which maps the infinite range
/// onto (-pi/2, pi/2) with a smooth integrand; composite Simpson there.
[[nodiscard]] inline double thermal_rate_quadrature(double n_bar, double kappa_d,
                                                    double eta_resonance) {
    const int n = 1 << 16;  // Simpson needs even interval count
    const double lo = -1.5707963267948966 + 1e-9, hi = -lo;
    const double h = (hi - lo) / n;
    auto f = [&](double theta) {
        const double t = std::tan(theta);
        const double delta = kappa_d / 2.0 * t;
        const double jac = kappa_d / 2.0 * (1.0 + t * t);
        const double x = 2.0 * delta / kappa_d;
        return n_bar * eta_resonance / (1.0 + x * x) * jac;
    };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0 / (2.0 * 3.14159265358979323846);
}

/// FWHM along the signal axis of |S|^2 at zero pump detuning, by bisection.
[[nodiscard]] inline double fwm_response_fwhm(double cooperativity, double kappa_b,
                                              double kappa_w) {
    const double peak = smpd::s_4wm(0.0, 0.0, cooperativity, kappa_b, kappa_w);
    double lo = 0.0, hi = 50.0 * (kappa_b + kappa_w);
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2.0;
        if (smpd::s_4wm(mid, 0.0, cooperativity, kappa_b, kappa_w) > peak / 2.0)
            lo = mid;
        else
            hi = mid;
    }
    return 2.0 * lo;
}

struct GridOptimum {
    double kappa_d = 0.0;
    double t_d = 0.0;
    double s = 0.0;
};

/// Exhaustive scan used as the optimizer oracle.
[[nodiscard]] inline GridOptimum brute_force_minimum(const smpd::SensitivityModel& model,
                                                     const smpd::OptimizeBounds& bounds,
                                                     int n_kappa, int n_td) {
    GridOptimum best;
    best.s = 1e300;
    for (int i = 0; i < n_kappa; ++i) {
        const double f = static_cast<double>(i) / (n_kappa - 1);
        const double k = bounds.kappa_d_min * std::pow(bounds.kappa_d_max / bounds.kappa_d_min, f);
        for (int j = 0; j < n_td; ++j) {
            const double g = static_cast<double>(j) / (n_td - 1);
            const double t = bounds.t_d_min + g * (bounds.t_d_max - bounds.t_d_min);
            const double s = model.sensitivity_at(k, t);
            if (s < best.s) best = {k, t, s};
        }
    }
    return best;
}

}  // namespace oracles
