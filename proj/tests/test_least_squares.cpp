#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "smpd/least_squares.hpp"

using namespace smpd;
using Catch::Approx;

TEST_CASE("quadratic model converges to the exact solution", "[lsq]") {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(i * 0.1);
        y.push_back(2.5 + 1.2 * x.back() - 0.8 * x.back() * x.back());
    }
    auto model = [](const Eigen::VectorXd& p, double xi) {
        return p(0) + p(1) * xi + p(2) * xi * xi;
    };
    Eigen::VectorXd init(3);
    init << 0.0, 0.0, 0.0;
    const FitResult fit = fit_curve(x, y, model, init);
    REQUIRE(fit.converged);
    CHECK(fit.parameter(0) == Approx(2.5).margin(1e-8));
    CHECK(fit.parameter(1) == Approx(1.2).margin(1e-8));
    CHECK(fit.parameter(2) == Approx(-0.8).margin(1e-8));
    CHECK(fit.residual_norm < 1e-7);
}

TEST_CASE("nonlinear model with noise reports sane uncertainties", "[lsq]") {
    std::mt19937_64 engine(11);
    std::normal_distribution<double> gauss(0.0, 0.01);
    std::vector<double> x, y;
    for (int i = 0; i < 60; ++i) {
        x.push_back(i * 0.05);
        y.push_back(1.7 * std::exp(-0.9 * x.back()) + gauss(engine));
    }
    auto model = [](const Eigen::VectorXd& p, double xi) { return p(0) * std::exp(-p(1) * xi); };
    Eigen::VectorXd init(2);
    init << 1.0, 0.5;
    const FitResult fit = fit_curve(x, y, model, init);
    REQUIRE(fit.converged);
    CHECK(fit.parameter(0) == Approx(1.7).margin(0.05));
    CHECK(fit.parameter(1) == Approx(0.9).margin(0.1));
    CHECK(fit.uncertainty(0) > 0.0);
    CHECK(fit.uncertainty(1) > 0.0);
    CHECK(std::abs(fit.parameter(0) - 1.7) < 5.0 * fit.uncertainty(0));
    CHECK(std::abs(fit.parameter(1) - 0.9) < 5.0 * fit.uncertainty(1));
}

TEST_CASE("underdetermined problems are flagged", "[lsq]") {
    ResidualFn residuals = [](const Eigen::VectorXd& p, Eigen::VectorXd& r) { r(0) = p(0) + p(1); };
    Eigen::VectorXd init(2);
    init << 0.0, 0.0;
    const FitResult fit = levenberg_marquardt(residuals, init, 1);
    CHECK_FALSE(fit.converged);
    CHECK(fit.message == "fewer residuals than parameters");
}

TEST_CASE("weighted residuals shift the solution toward precise points", "[lsq]") {
    // Two clusters of constant data; the low-sigma cluster dominates.
    std::vector<double> x = {0, 0, 0, 1, 1, 1};
    std::vector<double> y = {1.0, 1.0, 1.0, 3.0, 3.0, 3.0};
    std::vector<double> sigma = {0.01, 0.01, 0.01, 10.0, 10.0, 10.0};
    auto model = [](const Eigen::VectorXd& p, double) { return p(0); };
    Eigen::VectorXd init(1);
    init << 0.0;
    const FitResult fit = fit_curve(x, y, model, init, sigma);
    REQUIRE(fit.converged);
    CHECK(fit.parameter(0) == Approx(1.0).margin(1e-3));
}
