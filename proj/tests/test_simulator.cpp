#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "smpd/config.hpp"
#include "smpd/simulator.hpp"
#include "smpd/trace_io.hpp"

using namespace smpd;
using Catch::Approx;

namespace {

SimulationConfig reference_config() {
    SimulationConfig cfg;  // struct defaults hold the reference device values
    cfg.duration = 10.0;
    cfg.rng_seed = 97;
    return cfg;
}

}  // namespace

TEST_CASE("identical seeds give byte-identical traces", "[sim]") {
    const SimulationConfig cfg = reference_config();
    const ClickTrace a = run_cycles(cfg);
    const ClickTrace b = run_cycles(cfg);
    CHECK(trace_to_string(a) == trace_to_string(b));
    CHECK(a.total_cycles == b.total_cycles);

    SimulationConfig other = cfg;
    other.rng_seed = 98;
    CHECK(trace_to_string(run_cycles(other)) != trace_to_string(a));
}

TEST_CASE("trace bookkeeping", "[sim]") {
    const ClickTrace trace = run_cycles(reference_config());
    REQUIRE(trace.total_cycles > 0);
    CHECK(trace.mean_cycle_duration * static_cast<double>(trace.total_cycles) ==
          Approx(trace.total_wall_time).epsilon(1e-12));
    double prev = -1.0;
    for (const Click& c : trace.clicks) {
        CHECK(c.wall_time > prev);
        CHECK(c.wall_time <= trace.total_wall_time + 1e-9);
        prev = c.wall_time;
    }
    // Cause labels partition the clicks.
    const std::uint64_t by_cause =
        trace.count(ClickCause::signal) + trace.count(ClickCause::thermal) +
        trace.count(ClickCause::qubit_thermal) + trace.count(ClickCause::pump_heating) +
        trace.count(ClickCause::readout_error);
    CHECK(by_cause == trace.clicks.size());
}

TEST_CASE("dark rates at the reference operating point", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.duration = 10.0;

    SECTION("pump tuned lands on the measured tuned rate") {
        const ClickTrace trace = run_cycles(cfg);
        CHECK(trace.click_rate() == Approx(31.0).margin(3.0 * std::sqrt(31.0 / cfg.duration)));
    }
    SECTION("pump off leaves only the qubit channel") {
        const ClickTrace trace = run_cycles(cfg.pump_off());
        CHECK(trace.click_rate() == Approx(8.0).margin(3.0 * std::sqrt(8.0 / cfg.duration)));
        CHECK(trace.count(ClickCause::thermal) == 0);
        CHECK(trace.count(ClickCause::pump_heating) == 0);
        CHECK(trace.count(ClickCause::signal) == 0);
    }
    SECTION("pump detuned adds only the heating channel") {
        const ClickTrace trace = run_cycles(cfg.pump_detuned());
        CHECK(trace.click_rate() == Approx(10.0).margin(3.0 * std::sqrt(10.0 / cfg.duration)));
    }
    SECTION("hot cryostat") {
        SimulationConfig hot = cfg;
        hot.noise.cryostat_temperature = 0.090;
        hot.duration = 3.0;
        const ClickTrace trace = run_cycles(hot);
        CHECK(trace.click_rate() == Approx(3614.0).epsilon(0.10));
    }
}

TEST_CASE("cause budget at the reference operating point", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.duration = 10.0;
    const DarkCountBudget budget = dark_count_budget(cfg);
    CHECK(budget.alpha_q == Approx(8.0).epsilon(0.30));
    CHECK(budget.alpha_p == Approx(2.0).epsilon(0.30).margin(0.5));
    CHECK(budget.alpha_th == Approx(21.0).epsilon(0.30));
    // Conservation is exact.
    CHECK(budget.alpha_q + budget.alpha_p + budget.alpha_th + budget.readout_error ==
          Approx(budget.total).epsilon(1e-12));

    SimulationConfig no_pump_heat = cfg;
    no_pump_heat.noise.alpha_p = 0.0;
    CHECK(dark_count_budget(no_pump_heat).trace.count(ClickCause::pump_heating) == 0);

    SimulationConfig with_signal = cfg;
    with_signal.signal.kind = SignalSource::Kind::coherent;
    CHECK_THROWS_AS(dark_count_budget(with_signal), std::invalid_argument);
}

TEST_CASE("simulated rate matches the analytic expectation", "[sim][oracle]") {
    SimulationConfig cfg = reference_config();
    cfg.duration = 30.0;

    auto check_against_expectation = [](SimulationConfig c) {
        const ExpectedRates expected = expected_click_rate(c);
        const ClickTrace trace = run_cycles(c);
        const double tol = 3.0 * std::sqrt(expected.total / c.duration);
        CHECK(trace.click_rate() == Approx(expected.total).margin(tol));
    };
    SECTION("dark") { check_against_expectation(cfg); }
    SECTION("with signal") {
        cfg.signal.kind = SignalSource::Kind::coherent;
        cfg.signal.flux = 1500.0;
        check_against_expectation(cfg);
    }
    SECTION("hot and broadband") {
        cfg.noise.cryostat_temperature = 0.060;
        cfg.kappa_d_override = from_mhz(1.0);
        check_against_expectation(cfg);
    }
}

TEST_CASE("per-cause analytic rates compose to the total", "[sim][oracle]") {
    SimulationConfig cfg = reference_config();
    cfg.signal.kind = SignalSource::Kind::coherent;
    cfg.signal.flux = 800.0;
    const ExpectedRates e = expected_click_rate(cfg);
    CHECK(e.signal + e.thermal + e.qubit_thermal + e.pump_heating + e.readout_error ==
          Approx(e.total).epsilon(1e-9));
    // The simple budget sum is an excellent approximation at this scale.
    const double eta = cfg.eta_resonance();
    const double simple = expected_click_rate(cfg.dark()).total + cfg.signal.flux * eta;
    CHECK(e.total == Approx(simple).epsilon(0.02));
}

TEST_CASE("uniform-arrival survival reproduces the qubit efficiency", "[sim][oracle]") {
    // Design identity: integrating exp(-(T_d - t)/T1) over uniform arrival
    // times equals (T1/T_d)(1 - exp(-T_d/T1)).
    Rng rng(5);
    const double t_d = 15e-6, t1 = 70e-6;
    const int n = 400000;
    double survived = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = rng.uniform() * t_d;
        survived += rng.bernoulli(std::exp(-(t_d - t) / t1)) ? 1.0 : 0.0;
    }
    const double mc = survived / n;
    CHECK(mc == Approx(eta_q(t_d, t1)).margin(3.0 * std::sqrt(0.09 / n) + 1e-4));
}

TEST_CASE("duty cycle estimates", "[sim]") {
    SECTION("dark conditions give the quoted duty cycle") {
        const ClickTrace trace = run_cycles(reference_config());
        CHECK(duty_cycle_estimate(trace) == Approx(0.95).margin(0.005));
    }
    SECTION("no readout time and no clicks give unity") {
        SimulationConfig cfg = reference_config();
        cfg = cfg.pump_off();
        cfg.device.p_th_q = 0.0;
        cfg.noise.qubit_temperature = 0.0;
        cfg.noise.cryostat_temperature = 0.0;
        cfg.timing.t_ro = 0.0;
        cfg.duration = 0.5;
        const ClickTrace trace = run_cycles(cfg);
        REQUIRE(trace.clicks.empty());
        CHECK(duty_cycle_estimate(trace) == Approx(1.0).epsilon(1e-12));
    }
    SECTION("every-cycle clicks cost reset overhead") {
        SimulationConfig cfg = reference_config();
        cfg.signal.kind = SignalSource::Kind::coherent;
        cfg.signal.flux = 5e6;
        cfg.duration = 0.5;
        const ClickTrace trace = run_cycles(cfg);
        CHECK(duty_cycle_estimate(trace) < 0.95);
        CHECK(duty_cycle_estimate(trace) == Approx(15.0 / 16.6).margin(0.01));
    }
}

TEST_CASE("imperfect reset extends cycles", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.signal.kind = SignalSource::Kind::coherent;
    cfg.signal.flux = 5e6;  // click nearly every cycle
    cfg.duration = 0.5;
    SimulationConfig sloppy = cfg;
    sloppy.pi_fidelity = 0.7;
    CHECK(run_cycles(sloppy).mean_cycle_duration > run_cycles(cfg).mean_cycle_duration);
}

TEST_CASE("efficiency measurement", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.kappa_d_override = from_khz(314.0);
    cfg.conversion_calibration = 0.8 / cfg.eta_resonance();
    cfg.signal.kind = SignalSource::Kind::coherent;
    cfg.signal.flux = 1200.0;
    cfg.signal.omega = cfg.device.omega_b;
    cfg.duration = 15.0;

    SECTION("on resonance, calibrated to the measured peak") {
        const double eta = measure_efficiency(cfg, cfg.signal.flux);
        CHECK(eta == Approx(0.8).margin(0.02));
    }
    SECTION("far detuned the response collapses") {
        cfg.signal.omega = cfg.device.omega_b + 10.0 * cfg.kappa_d();
        const double eta = measure_efficiency(cfg, cfg.signal.flux);
        CHECK(eta < 0.01);
    }
    SECTION("zero flux calibration is rejected") {
        CHECK_THROWS_AS(measure_efficiency(cfg, 0.0), std::domain_error);
    }
}

TEST_CASE("fluorescence histograms", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.kappa_d_override = from_khz(500.0);
    cfg.conversion_calibration = 0.8 / cfg.eta_resonance();
    cfg.signal.kind = SignalSource::Kind::spin;

    SECTION("bin narrower than a cycle is rejected") {
        CHECK_THROWS_AS(run_fluorescence(cfg, 100, 1e-6), std::invalid_argument);
    }
    SECTION("lossless chain produces a decaying histogram") {
        const FluorescenceHistogram hist = run_fluorescence(cfg, 3000, 50e-6);
        REQUIRE(hist.bin_start.size() > 100);
        // Early bins dominated by fluorescence, late bins by background.
        double early = 0.0, late = 0.0;
        for (std::size_t i = 0; i < 10; ++i) early += hist.counts[i];
        for (std::size_t i = hist.counts.size() - 10; i < hist.counts.size(); ++i)
            late += hist.counts[i];
        CHECK(early > 3.0 * late);
    }
    SECTION("a fully lossy line leaves only background") {
        SimulationConfig lossy = cfg;
        lossy.signal.eta_loss = 0.0;
        lossy.fluorescence_background = 50.0;
        const FluorescenceHistogram hist = run_fluorescence(lossy, 2000, 50e-6);
        double early = 0.0, late = 0.0;
        for (std::size_t i = 0; i < 20; ++i) early += hist.counts[i];
        for (std::size_t i = hist.counts.size() - 20; i < hist.counts.size(); ++i)
            late += hist.counts[i];
        CHECK(early == Approx(late).epsilon(0.25).margin(20.0));
    }
}

TEST_CASE("zero duration yields an empty trace", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.duration = 0.0;
    const ClickTrace trace = run_cycles(cfg);
    CHECK(trace.total_cycles == 0);
    CHECK(trace.clicks.empty());
}

TEST_CASE("invalid configurations are rejected", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.timing.t_d = -1.0;
    CHECK_THROWS_AS(run_cycles(cfg), std::invalid_argument);
    SimulationConfig tiny = reference_config();
    tiny.duration = 1e-6;  // below one cycle
    CHECK_THROWS_AS(run_cycles(tiny), std::invalid_argument);
}

TEST_CASE("trace serialization format", "[sim]") {
    SimulationConfig cfg = reference_config();
    cfg.duration = 1.0;
    const ClickTrace trace = run_cycles(cfg);
    const std::string text = trace_to_string(trace);
    CHECK(text.rfind("cycle_index,wall_time_s,cause\n", 0) == 0);
    // One row per click plus the header.
    const std::size_t rows = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(rows == trace.clicks.size() + 1);
}
