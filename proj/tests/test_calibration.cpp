#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "smpd/calibration.hpp"
#include "smpd/constants.hpp"

using namespace smpd;
using Catch::Approx;

namespace {

struct LorentzianTruth {
    double center, fwhm, amplitude, baseline;
};

std::pair<std::vector<double>, std::vector<double>> sample_lorentzian(const LorentzianTruth& t,
                                                                      double span, int n,
                                                                      double noise,
                                                                      std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = t.center - span / 2 + span * i / (n - 1);
        const double u = 2.0 * (x[i] - t.center) / t.fwhm;
        y[i] = t.baseline + t.amplitude / (1.0 + u * u) + noise * gauss(engine);
    }
    return {x, y};
}

}  // namespace

TEST_CASE("resonance fit recovers a noisy peak to the kilohertz", "[calib]") {
    const LorentzianTruth truth{7.72e9, 170e3, 1.0, 0.05};
    const auto [x, y] = sample_lorentzian(truth, 1.0e6, 81, 0.01, 3);
    const LorentzianFit fit = fit_lorentzian(x, y);
    REQUIRE(fit.fit.converged);
    CHECK(fit.center() == Approx(truth.center).margin(1e3));
    CHECK(fit.fwhm() == Approx(truth.fwhm).margin(1e3));
}

TEST_CASE("noiseless resonance fit is exact to solver tolerance", "[calib]") {
    const LorentzianTruth truth{7.72e9, 170e3, -0.6, 1.0};
    const auto [x, y] = sample_lorentzian(truth, 1.2e6, 41, 0.0, 0);
    const LorentzianFit fit = fit_lorentzian(x, y);
    REQUIRE(fit.fit.converged);
    CHECK(fit.center() == Approx(truth.center).margin(1.0));
    CHECK(fit.fwhm() == Approx(truth.fwhm).epsilon(1e-6));
    CHECK(fit.amplitude() == Approx(truth.amplitude).margin(1e-6));
    CHECK(fit.baseline() == Approx(truth.baseline).margin(1e-6));
}

TEST_CASE("reflection dip separates coupling and internal losses", "[calib]") {
    // Total linewidth 170 kHz with internal losses of 2.2e5 rad/s.
    const double kappa_total_hz = 170e3;
    const double kappa_i_hz = to_hz(2.2e5);
    const double kappa_c_hz = kappa_total_hz - kappa_i_hz;
    const double depth = 4.0 * kappa_c_hz * kappa_i_hz / (kappa_total_hz * kappa_total_hz);
    const LorentzianTruth truth{7.72e9, kappa_total_hz, -depth, 1.0};
    const auto [x, y] = sample_lorentzian(truth, 1.2e6, 101, 0.003, 5);
    const LorentzianFit fit = fit_lorentzian(x, y);
    REQUIRE(fit.fit.converged);
    const auto [kappa_c, kappa_i] = fit.split_linewidths();
    CHECK(from_hz(kappa_i) == Approx(2.2e5).epsilon(0.05));
    CHECK(from_hz(kappa_c) == Approx(from_hz(kappa_c_hz)).epsilon(0.05));
}

TEST_CASE("degenerate resonance data is flagged", "[calib]") {
    std::vector<double> x(16), y(16, 0.3);
    for (int i = 0; i < 16; ++i) x[static_cast<std::size_t>(i)] = i;
    const LorentzianFit fit = fit_lorentzian(x, y);
    CHECK_FALSE(fit.fit.converged);
    CHECK_THROWS_AS(fit_lorentzian({1, 2, 3}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("conversion map fit", "[calib]") {
    const double omega_b = from_ghz(7.7);
    const double omega_p0 = from_ghz(7.292);
    const double c_true = 0.99, kb = from_khz(120), kw = from_mhz(1.75);
    std::mt19937_64 engine(17);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ResponseGrid grid;
    for (int i = 0; i < 41; ++i)
        grid.omega_p.push_back(omega_p0 + from_mhz(-4.0 + 8.0 * i / 40.0));
    for (int j = 0; j < 41; ++j)
        grid.omega.push_back(omega_b + from_khz(-600.0 + 1200.0 * j / 40.0));
    for (double wp : grid.omega_p)
        for (double w : grid.omega)
            grid.values.push_back(
                std::max(0.0, 0.8 * s_4wm(w - omega_b, wp - omega_p0, c_true, kb, kw) +
                                  0.016 * gauss(engine)));

    SECTION("recovers the operating point") {
        const FwmMapFit fit = fit_4wm_map(grid, omega_b);
        REQUIRE(fit.fit.converged);
        CHECK(fit.cooperativity() == Approx(c_true).margin(0.05));
        CHECK(fit.kappa_b() == Approx(kb).epsilon(0.10));
        CHECK(fit.kappa_w() == Approx(kw).epsilon(0.10));
        CHECK(fit.omega_4wm() == Approx(omega_p0).margin(from_khz(50.0)));
    }
    SECTION("recovery is invariant under uniform map scaling") {
        ResponseGrid scaled = grid;
        for (double& v : scaled.values) v *= 5.0;
        const FwmMapFit a = fit_4wm_map(grid, omega_b);
        const FwmMapFit b = fit_4wm_map(scaled, omega_b);
        CHECK(b.cooperativity() == Approx(a.cooperativity()).margin(0.01));
        CHECK(b.prefactor() == Approx(5.0 * a.prefactor()).epsilon(0.02));
    }
}

TEST_CASE("signal-off map yields failure or vanishing cooperativity", "[calib]") {
    ResponseGrid grid;
    std::mt19937_64 engine(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 21; ++i) grid.omega_p.push_back(from_ghz(7.29) + from_mhz(i - 10));
    for (int j = 0; j < 21; ++j) grid.omega.push_back(from_ghz(7.7) + from_khz(30.0 * (j - 10)));
    for (int k = 0; k < 441; ++k) grid.values.push_back(std::abs(0.002 * gauss(engine)));
    const FwmMapFit fit = fit_4wm_map(grid, from_ghz(7.7));
    CHECK((!fit.fit.converged || fit.cooperativity() < 0.05));
}

TEST_CASE("flat map is rejected outright", "[calib]") {
    ResponseGrid grid;
    for (int i = 0; i < 5; ++i) grid.omega_p.push_back(i);
    for (int j = 0; j < 5; ++j) grid.omega.push_back(j);
    grid.values.assign(25, 0.25);
    const FwmMapFit fit = fit_4wm_map(grid, 2.0);
    CHECK_FALSE(fit.fit.converged);
}

TEST_CASE("pump calibration on the exact quadratic oracle", "[calib]") {
    // C proportional to xi^2: one corrective step lands exactly on C = 1.
    const double xi_match = 0.0364;
    auto oracle = [&](double xi) { return (xi / xi_match) * (xi / xi_match); };
    const PumpCalibration cal = calibrate_pump(oracle, 2.0 * xi_match);  // starts at C = 4
    REQUIRE(cal.converged);
    CHECK(cal.iterations.size() == 2);  // C=4 measured, one step, C=1 verified
    CHECK(cal.final_cooperativity == Approx(1.0).epsilon(1e-12));
    CHECK(cal.xi_star == Approx(xi_match).epsilon(1e-12));
}

TEST_CASE("pump calibration is a one-step contraction from any start", "[calib][property]") {
    const double xi_match = 0.0364;
    for (double c0 : {0.04, 0.3, 0.9, 1.6, 9.0}) {
        auto oracle = [&](double xi) { return (xi / xi_match) * (xi / xi_match); };
        const PumpCalibration cal = calibrate_pump(oracle, xi_match * std::sqrt(c0), 1e-9);
        REQUIRE(cal.converged);
        CHECK(cal.iterations.size() <= 2);
        CHECK(cal.final_cooperativity == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("pump calibration failure paths", "[calib]") {
    const PumpCalibration dead = calibrate_pump([](double) { return 0.0; }, 0.05);
    CHECK_FALSE(dead.converged);

    // Saturating response: C plateaus at 0.5 regardless of drive.
    const PumpCalibration saturated = calibrate_pump([](double) { return 0.5; }, 0.05, 0.02, 10);
    CHECK_FALSE(saturated.converged);
    CHECK(saturated.iterations.size() == 10);
}

TEST_CASE("temperature-dependence fit recovers both branches", "[calib]") {
    std::mt19937_64 engine(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::vector<double> temps = {0.010, 0.030, 0.050, 0.060, 0.070, 0.090};

    SECTION("thermal branch") {
        const double rate0 = 31.0, k = 2e5;
        std::vector<double> rates;
        for (double t : temps) {
            const double clean = rate0 + k * bose_einstein(from_ghz(7.7), t);
            rates.push_back(clean * (1.0 + 0.05 * gauss(engine)));
        }
        const FitResult fit = fit_thermal_model(temps, rates, from_ghz(7.7));
        REQUIRE(fit.converged);
        CHECK(fit.parameter(0) == Approx(rate0).epsilon(0.10));
        CHECK(fit.parameter(1) == Approx(k).epsilon(0.10));
    }
    SECTION("qubit branch") {
        const double rate0 = 7.0, k = 2.2e4;
        std::vector<double> rates;
        for (double t : temps) {
            const double clean = rate0 + k * bose_einstein(from_ghz(6.533), t);
            rates.push_back(clean * (1.0 + 0.05 * gauss(engine)));
        }
        const FitResult fit = fit_thermal_model(temps, rates, from_ghz(6.533));
        REQUIRE(fit.converged);
        CHECK(fit.parameter(0) == Approx(rate0).epsilon(0.10));
        CHECK(fit.parameter(1) == Approx(k).epsilon(0.10));
    }
    SECTION("flat data gives a slope consistent with zero") {
        std::vector<double> rates;
        for (double t : temps) {
            (void)t;
            rates.push_back(12.0 + 0.3 * gauss(engine));
        }
        const FitResult fit = fit_thermal_model(temps, rates, from_ghz(7.7));
        REQUIRE(fit.converged);
        CHECK(std::abs(fit.parameter(1)) < 3.0 * fit.uncertainty(1) + 1e-9);
    }
    CHECK_THROWS_AS(fit_thermal_model({0.01, 0.02, 0.03}, {1, 2, 3}, from_ghz(7.7)),
                    std::invalid_argument);
}

TEST_CASE("fluorescence decay fit", "[calib]") {
    std::mt19937_64 engine(31);
    const double gamma = 1.0 / 1.24e-3;
    const double dt = 50e-6;
    const std::size_t n_bins = 160;

    SECTION("Poisson-noised decay recovers the lifetime within 5%") {
        std::vector<double> t(n_bins), counts(n_bins), sigma(n_bins);
        for (std::size_t i = 0; i < n_bins; ++i) {
            t[i] = static_cast<double>(i) * dt;
            const double mean = 160.0 * std::exp(-gamma * t[i]) + 15.0;
            std::poisson_distribution<int> pois(mean);
            counts[i] = pois(engine);
            sigma[i] = std::sqrt(std::max(counts[i], 1.0));
        }
        const ExponentialDecayFit fit = fit_exponential_decay(t, counts, sigma);
        REQUIRE(fit.fit.converged);
        CHECK(1.0 / fit.rate() == Approx(1.24e-3).epsilon(0.05));
        CHECK(fit.background() == Approx(15.0).margin(3.0));
        // Integral of the fitted decay vs the generating one.
        CHECK(fit.summed_counts(dt) == Approx(160.0 / -std::expm1(-gamma * dt)).epsilon(0.10));
    }
    SECTION("background-only data has amplitude consistent with zero") {
        std::vector<double> t(n_bins), counts(n_bins);
        for (std::size_t i = 0; i < n_bins; ++i) {
            t[i] = static_cast<double>(i) * dt;
            std::poisson_distribution<int> pois(20.0);
            counts[i] = pois(engine);
        }
        const ExponentialDecayFit fit = fit_exponential_decay(t, counts);
        CHECK(std::abs(fit.amplitude()) < 3.0 * fit.fit.uncertainty(1) + 1.0);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(fit_exponential_decay({0, 1, 2, 3, 4, 5}, {1, 2, -1, 3, 4, 5}),
                        std::invalid_argument);
        CHECK_THROWS_AS(fit_exponential_decay({0, 1}, {1, 2}), std::invalid_argument);
    }
}
