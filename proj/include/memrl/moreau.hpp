#pragma once

#include "memrl/pg_estimator.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace memrl {

enum class StopMode { grad_norm, fixed_steps, whichever_first };

std::string to_string(StopMode mode);
StopMode stop_mode_from_string(const std::string& name);

struct InnerConfig {
    double lambda = 2.0;       // proximal weight
    double beta = 0.02;        // ascent step size
    double nu = 0.0;           // surrogate gradient-norm tolerance
    int max_steps = 8;         // K
    int traj_batch_size = 10;  // D
    StopMode stop_mode = StopMode::fixed_steps;
    /// Pure grad_norm mode aborts after this many steps instead of looping forever.
    int grad_norm_step_limit = 100000;

    void validate() const;
};

struct InnerResult {
    ParamVector theta;
    /// Norm of the most recent stochastic surrogate gradient.
    double final_grad_norm = 0.0;
    int steps_taken = 0;
    int trajectories_used = 0;
};

struct InnerTraceRow {
    int step;
    double surrogate_value;
    double grad_norm;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int step, const std::string& detail)
        : std::runtime_error("divergence at inner step " + std::to_string(step) + ": " + detail),
          step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// One stochastic (or exact) evaluation of J and grad J at theta.
struct ValueGradEstimate {
    ParamVector grad;
    double value = 0.0;
    int trajectories = 0;
};

using GradientOracle = std::function<ValueGradEstimate(const ParamVector& theta, Rng& rng)>;

/// Fresh batch of D trajectories under theta on every call.
GradientOracle policy_gradient_oracle(const TaskMdp& task, const PolicyArch& arch, int batch_size);

/// Deterministic J(theta) = -(a/2)||theta||^2 + b * sum(theta).
GradientOracle quadratic_oracle(double a, double b);

/// batch_value - (lambda/2) ||theta - w||^2
double surrogate_value(double batch_value, const ParamVector& theta, const ParamVector& w,
                       double lambda);

/// batch_grad - lambda (theta - w)
ParamVector surrogate_gradient(const ParamVector& batch_grad, const ParamVector& theta,
                               const ParamVector& w, double lambda);

/// lambda (theta_tilde - w)
ParamVector envelope_grad_estimate(const ParamVector& theta_tilde, const ParamVector& w,
                                   double lambda);

/// Closed-form proximal point for J(theta) = -(a/2)||theta||^2 + b * sum(theta).
ParamVector exact_envelope_solution_quadratic(double a, double b, const ParamVector& w,
                                              double lambda);

/**
 * Inexact maximizer of the proximal surrogate, started at theta = w.
 *
 * Each iteration draws one estimate at the current theta, forms the
 * surrogate gradient, tests the stopping rule and otherwise takes an
 * ascent step of size beta. Throws DivergenceError if a parameter becomes
 * non-finite or exceeds 1e6 in magnitude.
 */
InnerResult inner_solve(const GradientOracle& oracle, const ParamVector& w, const InnerConfig& cfg,
                        Rng& rng, std::vector<InnerTraceRow>* trace = nullptr);

InnerResult inner_solve(const TaskMdp& task, const PolicyArch& arch, const ParamVector& w,
                        const InnerConfig& cfg, Rng& rng,
                        std::vector<InnerTraceRow>* trace = nullptr);

} // namespace memrl
