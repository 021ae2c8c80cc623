#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "smpd/config.hpp"

using namespace smpd;
using Catch::Approx;

TEST_CASE("empty text yields the full default configuration", "[config]") {
    const SimulationConfig cfg = load_config_text("", /*with_environment=*/false);
    CHECK(to_ghz(cfg.device.omega_q) == Approx(6.533));
    CHECK(to_mhz(cfg.device.chi_w) == Approx(16.0));
    CHECK(to_ghz(cfg.device.omega_b) == Approx(7.7));
    CHECK(cfg.device.t1 == Approx(70e-6));
    CHECK(cfg.device.f_ro == Approx(0.87));
    CHECK(cfg.tuning.cooperativity == Approx(1.0));
    CHECK(cfg.tuning.xi0 == Approx(0.03644344934278313).epsilon(1e-9));
    CHECK(to_khz(cfg.kappa_d()) == Approx(170.0));
    CHECK(cfg.noise.alpha_p == Approx(2.0));
}

TEST_CASE("values parse with comments and unit suffixes", "[config]") {
    const SimulationConfig cfg = load_config_text(
        "# comment line\n"
        "t1_us = 80   # trailing comment\n"
        "kappa_w_mhz = 2.0\n"
        "field_temperature_mk = 45\n"
        "signal_kind = coherent\n"
        "signal_flux_per_s = 1500\n"
        "signal_detuning_khz = -120\n",
        false);
    CHECK(cfg.device.t1 == Approx(80e-6));
    CHECK(to_mhz(cfg.device.kappa_w) == Approx(2.0));
    CHECK(cfg.noise.field_temperature == Approx(0.045));
    CHECK(cfg.signal.kind == SignalSource::Kind::coherent);
    CHECK(cfg.signal.flux == Approx(1500.0));
    CHECK(cfg.signal.omega == Approx(cfg.device.omega_b + from_khz(-120.0)));
}

TEST_CASE("rejection names the offending key", "[config]") {
    SECTION("unknown key") {
        try {
            (void)load_config_text("t1_millis = 7\n", false);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("t1_millis") != std::string::npos);
        }
    }
    SECTION("negative lifetime") {
        try {
            (void)load_config_text("t1_us = -1\n", false);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("t1_us") != std::string::npos);
        }
    }
    SECTION("trailing garbage") {
        try {
            (void)load_config_text("t1_us = 70q\n", false);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("t1_us") != std::string::npos);
        }
    }
    SECTION("malformed line") { CHECK_THROWS_AS(load_config_text("zzz\n", false), ConfigError); }
    SECTION("bad enumeration") {
        CHECK_THROWS_AS(load_config_text("signal_kind = banana\n", false), ConfigError);
    }
}

TEST_CASE("cooperativity consistency with the pump amplitude", "[config]") {
    // Matched pair passes.
    const SimulationConfig ok = load_config_text(
        "cooperativity = 1.0\n"
        "xi0 = 0.03644344934278313\n",
        false);
    CHECK(ok.tuning.cooperativity == Approx(1.0));
    // Mismatched pair is an invariant violation.
    CHECK_THROWS_AS(load_config_text("cooperativity = 1.0\nxi0 = 0.07\n", false), ConfigError);
    // Giving only xi0 derives the cooperativity.
    const SimulationConfig derived = load_config_text("xi0 = 0.03644344934278313\n", false);
    CHECK(derived.tuning.cooperativity == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("environment overrides any key", "[config]") {
    setenv("SMPD_T1_US", "42", 1);
    const SimulationConfig cfg = load_config_text("t1_us = 70\n", true);
    unsetenv("SMPD_T1_US");
    CHECK(cfg.device.t1 == Approx(42e-6));
}

TEST_CASE("qubit temperature key replaces the direct population", "[config]") {
    const SimulationConfig cfg = load_config_text("qubit_temperature_mk = 42\n", false);
    CHECK(cfg.p_th_effective() ==
          Approx(bose_einstein(cfg.device.omega_q, 0.042)).epsilon(1e-9));
}

TEST_CASE("shipped reference file parses and matches the defaults", "[config]") {
    const SimulationConfig file = load_config(std::string(SMPD_SOURCE_DIR) +
                                              "/data/reference-device.cfg");
    const SimulationConfig defaults = load_config_text("", false);
    CHECK(file.device.omega_b == Approx(defaults.device.omega_b));
    CHECK(file.device.p_th_q == Approx(defaults.device.p_th_q));
    CHECK(file.timing.t_d == Approx(defaults.timing.t_d));
    CHECK(file.kappa_d() == Approx(defaults.kappa_d()));
    CHECK(file.noise.field_temperature == Approx(defaults.noise.field_temperature));
}
