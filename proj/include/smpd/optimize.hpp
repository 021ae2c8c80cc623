#pragma once

// Analytic sensitivity optimization over detection bandwidth and window
// length. For a source of finite linewidth the spectral acceptance is the
// detector Lorentzian averaged over the source line, kappa_d/(kappa_d +
// gamma_source); the dark-count budget grows linearly with kappa_d through the
// thermal term, so the optimum balances acceptance against noise.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "smpd/figures_of_merit.hpp"
#include "smpd/types.hpp"

namespace smpd {

struct SensitivityModel {
    DeviceParams device;
    TuningState tuning;
    CycleTiming timing;   // t_ro and t_reset_unit are kept; t_d is optimized
    NoiseEnvironment noise;
    double n_th = 0.0;              // thermal occupation of the input field
    double source_linewidth = 0.0;  // rad/s; 0 = monochromatic

    /// Detection efficiency for the source, averaged over its line.
    [[nodiscard]] double efficiency(double kappa_d, double t_d) const {
        const double acceptance =
            source_linewidth > 0 ? kappa_d / (kappa_d + source_linewidth) : 1.0;
        const double duty = t_d / (t_d + timing.t_ro);
        return acceptance * eta_4wm(tuning.cooperativity) * eta_q(t_d, device.t1) * device.f_ro *
               duty;
    }

    /// Dark-count budget alpha_q + alpha_p + alpha_th at this operating point.
    [[nodiscard]] double dark_rate(double kappa_d, double t_d) const {
        CycleTiming t = timing;
        t.t_d = t_d;
        const double eta_res = eta_4wm(tuning.cooperativity) * eta_q(t_d, device.t1) *
                               device.f_ro * t_d / (t_d + timing.t_ro);
        return alpha_q_rate(device.p_th_q, t, device.t1) + noise.alpha_p +
               alpha_th_rate(n_th, kappa_d, eta_res);
    }

    [[nodiscard]] double sensitivity_at(double kappa_d, double t_d) const {
        return sensitivity(efficiency(kappa_d, t_d), dark_rate(kappa_d, t_d), device.omega_b);
    }
};

struct OptimizeBounds {
    double kappa_d_min = 0.0, kappa_d_max = 0.0;  // rad/s
    double t_d_min = 0.0, t_d_max = 0.0;          // s

    void validate() const {
        if (!(kappa_d_min > 0) || !(kappa_d_max > kappa_d_min))
            throw std::invalid_argument("optimize: degenerate kappa_d bounds");
        if (!(t_d_min > 0) || !(t_d_max > t_d_min))
            throw std::invalid_argument("optimize: degenerate t_d bounds");
    }
};

struct TradeoffPoint {
    double kappa_d = 0.0;
    double t_d = 0.0;  // best window at this bandwidth
    double s = 0.0;
};

struct OptimizeResult {
    double kappa_d = 0.0;
    double t_d = 0.0;
    double s = 0.0;
    std::vector<TradeoffPoint> tradeoff;  // best sensitivity per bandwidth
};

namespace detail {

template <typename F>
[[nodiscard]] double golden_section_min(F f, double lo, double hi, int iterations = 80) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace detail

/// Deterministic coarse grid (log-spaced bandwidth, linear window) followed by
/// alternating golden-section refinement of each coordinate.
[[nodiscard]] inline OptimizeResult optimize_sensitivity(const SensitivityModel& model,
                                                         const OptimizeBounds& bounds,
                                                         int grid_points = 48) {
    bounds.validate();
    const int n = std::max(grid_points, 8);
    auto kappa_at = [&](int i) {
        const double f = static_cast<double>(i) / (n - 1);
        return bounds.kappa_d_min * std::pow(bounds.kappa_d_max / bounds.kappa_d_min, f);
    };
    auto td_at = [&](int j) {
        const double f = static_cast<double>(j) / (n - 1);
        return bounds.t_d_min + f * (bounds.t_d_max - bounds.t_d_min);
    };

    OptimizeResult result;
    result.s = std::numeric_limits<double>::infinity();
    int best_i = 0, best_j = 0;
    for (int i = 0; i < n; ++i) {
        double row_best = std::numeric_limits<double>::infinity();
        double row_best_td = td_at(0);
        for (int j = 0; j < n; ++j) {
            const double s = model.sensitivity_at(kappa_at(i), td_at(j));
            if (s < row_best) {
                row_best = s;
                row_best_td = td_at(j);
            }
            if (s < result.s) {
                result.s = s;
                best_i = i;
                best_j = j;
            }
        }
        result.tradeoff.push_back({kappa_at(i), row_best_td, row_best});
    }

    // Refine around the best cell, alternating between the two coordinates.
    double kappa = kappa_at(best_i), t_d = td_at(best_j);
    double k_lo = kappa_at(std::max(0, best_i - 1)), k_hi = kappa_at(std::min(n - 1, best_i + 1));
    double t_lo = td_at(std::max(0, best_j - 1)), t_hi = td_at(std::min(n - 1, best_j + 1));
    for (int sweep = 0; sweep < 3; ++sweep) {
        kappa = detail::golden_section_min(
            [&](double k) { return model.sensitivity_at(k, t_d); }, k_lo, k_hi);
        t_d = detail::golden_section_min(
            [&](double t) { return model.sensitivity_at(kappa, t); }, t_lo, t_hi);
    }
    result.kappa_d = kappa;
    result.t_d = t_d;
    result.s = model.sensitivity_at(kappa, t_d);
    return result;
}

}  // namespace smpd
