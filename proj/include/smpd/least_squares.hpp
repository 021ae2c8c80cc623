#pragma once

// Damped Gauss-Newton (Levenberg-style) nonlinear least squares with
// finite-difference Jacobians. Every calibration fit in this project is a
// handful of parameters over at most a few thousand samples, so a dense
// normal-equation solve (Eigen LDLT) is entirely adequate. Each fit owns its
// workspace; concurrent independent fits are safe.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace smpd {

struct FitResult {
    Eigen::VectorXd parameters;
    Eigen::VectorXd uncertainties;  // 1-sigma, from the Jacobian covariance at the optimum
    double residual_norm = 0.0;     // sqrt(sum of squared residuals)
    bool converged = false;
    int iterations = 0;
    std::string message;

    [[nodiscard]] double parameter(int i) const { return parameters(i); }
    [[nodiscard]] double uncertainty(int i) const { return uncertainties(i); }
};

struct FitOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-9;   // relative parameter step
    double lambda_initial = 1e-3;
    double lambda_max = 1e12;
};

/// residual_fn fills r(p); r must keep a fixed size across calls.
using ResidualFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

[[nodiscard]] inline FitResult levenberg_marquardt(const ResidualFn& residual_fn,
                                                   Eigen::VectorXd initial, int residual_count,
                                                   const FitOptions& options = {}) {
    const int n = static_cast<int>(initial.size());
    const int m = residual_count;
    FitResult result;
    result.parameters = initial;
    result.uncertainties = Eigen::VectorXd::Zero(n);
    if (m < n) {
        result.message = "fewer residuals than parameters";
        return result;
    }

    Eigen::VectorXd p = initial;
    Eigen::VectorXd r(m), r_trial(m), r_step(m);
    Eigen::MatrixXd jacobian(m, n);
    residual_fn(p, r);
    double cost = r.squaredNorm();
    double lambda = options.lambda_initial;

    auto numeric_jacobian = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& r0) {
        Eigen::VectorXd probe = at;
        for (int j = 0; j < n; ++j) {
            const double h = std::sqrt(1e-12) * std::max(1.0, std::abs(at(j)));
            probe(j) = at(j) + h;
            residual_fn(probe, r_step);
            jacobian.col(j) = (r_step - r0) / h;
            probe(j) = at(j);
        }
    };

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        numeric_jacobian(p, r);
        const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
        const Eigen::VectorXd jtr = jacobian.transpose() * r;

        bool stepped = false;
        while (lambda <= options.lambda_max) {
            Eigen::MatrixXd damped = jtj;
            for (int j = 0; j < n; ++j)
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
            const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd p_trial = p + delta;
            residual_fn(p_trial, r_trial);
            const double cost_trial = r_trial.squaredNorm();
            if (std::isfinite(cost_trial) && cost_trial < cost) {
                const double rel_step = delta.norm() / std::max(1.0, p.norm());
                p = p_trial;
                r = r_trial;
                cost = cost_trial;
                lambda = std::max(lambda * 0.25, 1e-14);
                stepped = true;
                if (rel_step < options.step_tolerance) {
                    result.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (result.converged) break;
        if (!stepped) {
            // No downhill step at any damping: either at the optimum or the
            // problem is degenerate. Treat a finite small gradient as converged.
            result.converged = jtr.norm() <= 1e-8 * std::max(1.0, std::sqrt(cost));
            result.message = result.converged ? "" : "no descent step found";
            break;
        }
    }
    if (iter == options.max_iterations) result.message = "iteration limit reached";

    result.parameters = p;
    result.iterations = iter + 1;
    result.residual_norm = std::sqrt(cost);

    // Covariance at the optimum: sigma^2 (J^T J)^-1 with sigma^2 the reduced
    // residual variance. Approximate but reported regardless.
    numeric_jacobian(p, r);
    const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    const double dof = std::max(1, m - n);
    const double sigma2 = cost / dof;
    const Eigen::MatrixXd cov =
        jtj.completeOrthogonalDecomposition().pseudoInverse() * sigma2;
    for (int j = 0; j < n; ++j)
        result.uncertainties(j) = cov(j, j) > 0 ? std::sqrt(cov(j, j)) : 0.0;
    return result;
}

/// Convenience wrapper for y(x) curve models with optional per-point sigmas.
template <typename Model>
[[nodiscard]] FitResult fit_curve(const std::vector<double>& x, const std::vector<double>& y,
                                  Model model, Eigen::VectorXd initial,
                                  const std::vector<double>& sigma = {},
                                  const FitOptions& options = {}) {
    const int m = static_cast<int>(x.size());
    ResidualFn residuals = [&, model](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        for (int i = 0; i < m; ++i) {
            const double w = sigma.empty() ? 1.0 : 1.0 / sigma[static_cast<std::size_t>(i)];
            r(i) = (model(p, x[static_cast<std::size_t>(i)]) - y[static_cast<std::size_t>(i)]) * w;
        }
    };
    return levenberg_marquardt(residuals, std::move(initial), m, options);
}

}  // namespace smpd
