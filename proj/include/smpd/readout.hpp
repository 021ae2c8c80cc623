#pragma once

// Dispersive readout model: the measured quadrature is Gaussian around a
// state-dependent mean, and a click is declared above a fixed threshold. The
// threshold sits far from the ground-state distribution so that ground-state
// false positives stay below a configured bound, while the excited-state
// detection probability reproduces the device readout fidelity.

#include <cmath>
#include <stdexcept>

#include "smpd/random.hpp"

namespace smpd {

namespace detail {

/// Inverse standard normal CDF (Acklam's rational approximation, |err| < 1.2e-8;
/// refined with one Halley step of the complementary error function).
[[nodiscard]] inline double inverse_normal_cdf(double p) {
    if (p <= 0.0 || p >= 1.0) throw std::domain_error("inverse_normal_cdf: p must lie in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

[[nodiscard]] inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

struct ReadoutModel {
    double i_ground = 0.0;   // ground-state quadrature mean, arb. units
    double i_excited = 1.0;  // excited-state quadrature mean
    double sigma = 0.2;      // shared standard deviation
    double threshold = 0.8;  // click above this value
    double t_ro = 0.8e-6;    // s

    /// Build a model whose excited-state click probability equals f_ro and
    /// whose ground-state false-positive probability equals fp_bound, on the
    /// unit quadrature separation.
    [[nodiscard]] static ReadoutModel from_fidelity(double f_ro, double fp_bound, double t_ro) {
        if (f_ro <= 0 || f_ro >= 1) throw std::domain_error("from_fidelity: f_ro must lie in (0,1)");
        if (fp_bound <= 0 || fp_bound >= 0.5)
            throw std::domain_error("from_fidelity: fp_bound must lie in (0,0.5)");
        const double z_e = detail::inverse_normal_cdf(f_ro);
        const double z_g = -detail::inverse_normal_cdf(fp_bound);
        ReadoutModel m;
        m.sigma = 1.0 / (z_e + z_g);
        m.threshold = m.i_ground + z_g * m.sigma;
        m.t_ro = t_ro;
        return m;
    }

    /// Click probability for an excited qubit implied by the Gaussian model.
    [[nodiscard]] double implied_fidelity() const {
        return detail::normal_cdf((i_excited - threshold) / sigma);
    }
    /// Ground-state false positive probability.
    [[nodiscard]] double false_positive_probability() const {
        return detail::normal_cdf((i_ground - threshold) / sigma);
    }

    /// Sample one readout: draw the quadrature, compare to threshold.
    [[nodiscard]] bool sample_click(bool excited, Rng& rng) const {
        const double mean = excited ? i_excited : i_ground;
        return rng.normal(mean, sigma) >= threshold;
    }

    void validate() const {
        if (sigma <= 0) throw std::invalid_argument("readout sigma must be positive");
        if (i_excited <= i_ground) throw std::invalid_argument("i_excited must exceed i_ground");
        if (t_ro < 0) throw std::invalid_argument("t_ro must be non-negative");
    }
};

}  // namespace smpd
