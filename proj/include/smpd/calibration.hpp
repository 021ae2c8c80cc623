#pragma once

// Calibration procedures: resonance fits, conversion-map fits, iterative pump
// amplitude tuning, temperature-dependence fits and fluorescence decay fits.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smpd/figures_of_merit.hpp"
#include "smpd/fwm_response.hpp"
#include "smpd/least_squares.hpp"

namespace smpd {

// =============================================================================
// Lorentzian resonance fit
// =============================================================================

/// Parameters: [center, fwhm, amplitude, baseline]; model
/// baseline + amplitude / (1 + (2(x - center)/fwhm)^2). A reflection dip has
/// amplitude < 0; split_linewidths() then separates coupling and internal
/// rates from the dip depth.
struct LorentzianFit {
    FitResult fit;

    [[nodiscard]] double center() const { return fit.parameter(0); }
    [[nodiscard]] double fwhm() const { return std::abs(fit.parameter(1)); }
    [[nodiscard]] double amplitude() const { return fit.parameter(2); }
    [[nodiscard]] double baseline() const { return fit.parameter(3); }

    /// For a reflection dip |S11|^2 = 1 - 4 k_c k_i / k^2 * L(x): returns
    /// {kappa_c, kappa_i} with kappa_c the larger root (over-coupled branch).
    [[nodiscard]] std::pair<double, double> split_linewidths() const {
        const double depth = -amplitude() / baseline();
        if (depth <= 0 || depth > 1.0 + 1e-9)
            throw std::runtime_error("split_linewidths: data is not a normalized reflection dip");
        const double root = std::sqrt(std::max(0.0, 1.0 - depth));
        const double k = fwhm();
        return {k * (1.0 + root) / 2.0, k * (1.0 - root) / 2.0};
    }
};

[[nodiscard]] inline LorentzianFit fit_lorentzian(const std::vector<double>& x,
                                                  const std::vector<double>& y,
                                                  const std::vector<double>& sigma = {}) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_lorentzian: size mismatch");
    if (x.size() < 8) throw std::invalid_argument("fit_lorentzian: need at least 8 samples");

    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double span = *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
    LorentzianFit result;
    if (*hi_it - *lo_it <= 1e-12 * std::max(std::abs(*hi_it), 1.0)) {
        result.fit.parameters = Eigen::VectorXd::Zero(4);
        result.fit.uncertainties = Eigen::VectorXd::Zero(4);
        result.fit.message = "degenerate (flat) data";
        return result;
    }

    // Peak or dip: whichever extremum lies further from the edge level.
    const double edge = (y.front() + y.back()) / 2.0;
    const bool dip = (edge - *lo_it) > (*hi_it - edge);
    const double extremum_x = dip ? x[static_cast<std::size_t>(lo_it - y.begin())]
                                  : x[static_cast<std::size_t>(hi_it - y.begin())];
    Eigen::VectorXd initial(4);
    initial << extremum_x, span / 4.0, (dip ? *lo_it : *hi_it) - edge, edge;

    auto model = [](const Eigen::VectorXd& p, double xi) {
        const double u = 2.0 * (xi - p(0)) / p(1);
        return p(3) + p(2) / (1.0 + u * u);
    };
    result.fit = fit_curve(x, y, model, initial, sigma);
    if (result.fit.converged && span < 2.0 * result.fwhm()) {
        result.fit.converged = false;
        result.fit.message = "samples span fewer than two linewidths";
    }
    return result;
}

// =============================================================================
// Conversion-map fit
// =============================================================================

/// Row-major grid of a measured quantity over (pump frequency, signal
/// frequency): values[i * omega.size() + j] belongs to (omega_p[i], omega[j]).
struct ResponseGrid {
    std::vector<double> omega_p;  // rad/s
    std::vector<double> omega;    // rad/s
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        return values[i * omega.size() + j];
    }
    void validate() const {
        if (omega_p.size() < 3 || omega.size() < 3)
            throw std::invalid_argument("ResponseGrid: need at least a 3x3 grid");
        if (values.size() != omega_p.size() * omega.size())
            throw std::invalid_argument("ResponseGrid: value count does not match axes");
    }
};

/// Parameters: [C, kappa_b, kappa_w, omega_4wm, prefactor]. The prefactor is a
/// free detection amplitude, so recovery is invariant under uniform scaling of
/// the map.
struct FwmMapFit {
    FitResult fit;
    [[nodiscard]] double cooperativity() const { return std::abs(fit.parameter(0)); }
    [[nodiscard]] double kappa_b() const { return std::abs(fit.parameter(1)); }
    [[nodiscard]] double kappa_w() const { return std::abs(fit.parameter(2)); }
    [[nodiscard]] double omega_4wm() const { return fit.parameter(3); }
    [[nodiscard]] double prefactor() const { return fit.parameter(4); }
};

namespace detail {

/// Full width at half maximum of a sampled 1D profile around its maximum.
[[nodiscard]] inline double sampled_fwhm(const std::vector<double>& axis,
                                         const std::vector<double>& profile) {
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(profile.begin(), profile.end()) - profile.begin());
    const double half = profile[peak] / 2.0;
    double lo = axis.front(), hi = axis.back();
    for (std::size_t j = peak; j-- > 0;) {
        if (profile[j] < half) {
            lo = axis[j];
            break;
        }
    }
    for (std::size_t j = peak + 1; j < profile.size(); ++j) {
        if (profile[j] < half) {
            hi = axis[j];
            break;
        }
    }
    return hi - lo;
}

}  // namespace detail

[[nodiscard]] inline FwmMapFit fit_4wm_map(const ResponseGrid& grid, double omega_b) {
    grid.validate();
    const std::size_t np = grid.omega_p.size(), nw = grid.omega.size();

    FwmMapFit result;
    const auto [lo_it, hi_it] = std::minmax_element(grid.values.begin(), grid.values.end());
    if (*hi_it - *lo_it <= 1e-9 * std::max(std::abs(*hi_it), 1.0)) {
        result.fit.parameters = Eigen::VectorXd::Zero(5);
        result.fit.uncertainties = Eigen::VectorXd::Zero(5);
        result.fit.message = "conversion ridge absent (flat map)";
        return result;
    }

    // Presearch: locate the ridge maximum and estimate the two widths from the
    // profiles through it. The signal cut has FWHM ~ kappa_d ~ 2 kappa_b, the
    // pump cut has FWHM ~ 2 kappa_w (at C ~ 1).
    const std::size_t flat_peak =
        static_cast<std::size_t>(hi_it - grid.values.begin());
    const std::size_t pi = flat_peak / nw, wj = flat_peak % nw;
    std::vector<double> cut_w(nw), cut_p(np);
    for (std::size_t j = 0; j < nw; ++j) cut_w[j] = grid.at(pi, j);
    for (std::size_t i = 0; i < np; ++i) cut_p[i] = grid.at(i, wj);
    const double kb0 = std::max(detail::sampled_fwhm(grid.omega, cut_w) / 2.0,
                                (grid.omega.back() - grid.omega.front()) / ( 4.0 * double(nw)));
    const double kw0 = std::max(detail::sampled_fwhm(grid.omega_p, cut_p) / 2.0, kb0);

    Eigen::VectorXd initial(5);
    initial << 1.0, kb0, kw0, grid.omega_p[pi] - (grid.omega[wj] - omega_b), *hi_it;

    ResidualFn residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        const double c = std::abs(p(0)), kb = std::abs(p(1)), kw = std::abs(p(2));
        for (std::size_t i = 0; i < np; ++i) {
            for (std::size_t j = 0; j < nw; ++j) {
                const double delta = grid.omega[j] - omega_b;
                const double delta_p = grid.omega_p[i] - p(3);
                const double model = p(4) * s_4wm(delta, delta_p, c, std::max(kb, 1.0),
                                                  std::max(kw, 1.0));
                r(static_cast<int>(i * nw + j)) = model - grid.at(i, j);
            }
        }
    };
    result.fit = levenberg_marquardt(residuals, initial, static_cast<int>(np * nw));
    return result;
}

// =============================================================================
// Pump amplitude calibration
// =============================================================================

struct PumpCalibration {
    double xi_star = 0.0;
    double final_cooperativity = 0.0;
    bool converged = false;
    std::string message;
    std::vector<std::pair<double, double>> iterations;  // (xi, fitted C)
};

/// Iterates xi <- xi / sqrt(C_measured) until |C - 1| <= tolerance. The oracle
/// maps a pump amplitude to a measured cooperativity (C proportional to xi^2
/// for the physical device, so the exact oracle converges in one step).
[[nodiscard]] inline PumpCalibration calibrate_pump(
    const std::function<double(double)>& cooperativity_oracle, double xi_initial,
    double tolerance = 0.02, int max_iterations = 10) {
    if (xi_initial <= 0) throw std::invalid_argument("calibrate_pump: xi_initial must be positive");
    PumpCalibration cal;
    double xi = xi_initial;
    for (int i = 0; i < max_iterations; ++i) {
        const double c = cooperativity_oracle(xi);
        cal.iterations.emplace_back(xi, c);
        if (!(c > 0.0)) {
            cal.message = "oracle returned non-positive cooperativity";
            cal.xi_star = xi;
            cal.final_cooperativity = c;
            return cal;
        }
        if (std::abs(c - 1.0) <= tolerance) {
            cal.converged = true;
            cal.xi_star = xi;
            cal.final_cooperativity = c;
            return cal;
        }
        xi /= std::sqrt(c);
    }
    cal.message = "iteration limit reached without |C-1| within tolerance";
    cal.xi_star = xi;
    cal.final_cooperativity = cal.iterations.back().second;
    return cal;
}

// =============================================================================
// Temperature dependence of count rates
// =============================================================================

/// Fits rate(T) = rate_0 + K * n(T) where n(T) is the Bose-Einstein occupation
/// of the mode at omega_mode (buffer frequency for the thermal branch, qubit
/// frequency for the qubit branch). Parameters: [rate_0, K].
[[nodiscard]] inline FitResult fit_thermal_model(const std::vector<double>& temperatures,
                                                 const std::vector<double>& rates,
                                                 double omega_mode,
                                                 const std::vector<double>& sigma = {}) {
    if (temperatures.size() != rates.size())
        throw std::invalid_argument("fit_thermal_model: size mismatch");
    if (temperatures.size() < 4)
        throw std::invalid_argument("fit_thermal_model: need at least 4 temperature points");
    std::vector<double> occupation(temperatures.size());
    std::transform(temperatures.begin(), temperatures.end(), occupation.begin(),
                   [&](double t) { return bose_einstein(omega_mode, t); });

    const double x_span = *std::max_element(occupation.begin(), occupation.end()) -
                          *std::min_element(occupation.begin(), occupation.end());
    const double y_span = *std::max_element(rates.begin(), rates.end()) -
                          *std::min_element(rates.begin(), rates.end());
    Eigen::VectorXd initial(2);
    initial << rates.front(), x_span > 0 ? y_span / x_span : 0.0;

    auto model = [](const Eigen::VectorXd& p, double n) { return p(0) + p(1) * n; };
    return fit_curve(occupation, rates, model, initial, sigma);
}

// =============================================================================
// Fluorescence decay fit
// =============================================================================

/// counts(t) = amplitude * exp(-rate * t) + background. Parameters:
/// [rate, amplitude, background].
struct ExponentialDecayFit {
    FitResult fit;
    [[nodiscard]] double rate() const { return std::abs(fit.parameter(0)); }
    [[nodiscard]] double amplitude() const { return fit.parameter(1); }
    [[nodiscard]] double background() const { return fit.parameter(2); }
    /// Continuous area under the decaying component, amplitude / rate.
    [[nodiscard]] double area() const { return amplitude() / rate(); }
    /// Fitted decay counts summed over an infinite bin grid starting at
    /// t_start with the given bin width.
    [[nodiscard]] double summed_counts(double bin_width, double t_start = 0.0) const {
        return amplitude() * std::exp(-rate() * t_start) / -std::expm1(-rate() * bin_width);
    }
};

[[nodiscard]] inline ExponentialDecayFit fit_exponential_decay(
    const std::vector<double>& times, const std::vector<double>& counts,
    const std::vector<double>& sigma = {}) {
    if (times.size() != counts.size())
        throw std::invalid_argument("fit_exponential_decay: size mismatch");
    if (times.size() < 6) throw std::invalid_argument("fit_exponential_decay: need at least 6 bins");
    if (std::any_of(counts.begin(), counts.end(), [](double c) { return c < 0; }))
        throw std::invalid_argument("fit_exponential_decay: negative counts");

    // Tail level estimates the background, the early excess the amplitude; the
    // initial rate comes from the time over which the excess drops by half.
    const std::size_t n = times.size();
    double tail = 0.0;
    const std::size_t tail_from = n - std::max<std::size_t>(2, n / 5);
    for (std::size_t i = tail_from; i < n; ++i) tail += counts[i];
    tail /= static_cast<double>(n - tail_from);
    const double a0 = std::max(counts.front() - tail, 1e-12);
    double t_half = times[n / 2];
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] - tail < a0 / 2.0) {
            t_half = times[i];
            break;
        }
    }
    const double span = std::max(t_half - times.front(), (times.back() - times.front()) / 100.0);
    Eigen::VectorXd initial(3);
    initial << std::log(2.0) / span, a0, tail;

    auto model = [](const Eigen::VectorXd& p, double t) {
        return p(1) * std::exp(-std::abs(p(0)) * t) + p(2);
    };
    ExponentialDecayFit result;
    result.fit = fit_curve(times, counts, model, initial, sigma);
    return result;
}

}  // namespace smpd
