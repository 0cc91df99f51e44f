#include "memrl/moreau.hpp"

#include <cmath>

namespace memrl {

namespace {

constexpr double kDivergenceMagnitude = 1e6;

void check_same_dim(const ParamVector& a, const ParamVector& b, const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

} // namespace

std::string to_string(StopMode mode) {
    switch (mode) {
    case StopMode::grad_norm:
        return "grad_norm";
    case StopMode::fixed_steps:
        return "fixed_steps";
    case StopMode::whichever_first:
        return "whichever_first";
    }
    return "unknown";
}

StopMode stop_mode_from_string(const std::string& name) {
    if (name == "grad_norm") {
        return StopMode::grad_norm;
    }
    if (name == "fixed_steps") {
        return StopMode::fixed_steps;
    }
    if (name == "whichever_first") {
        return StopMode::whichever_first;
    }
    throw std::invalid_argument("unknown stop mode '" + name + "'");
}

void InnerConfig::validate() const {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("inner.lambda must be > 0");
    }
    if (!(beta > 0.0)) {
        throw std::invalid_argument("inner.beta must be > 0");
    }
    if (!(nu >= 0.0)) {
        throw std::invalid_argument("inner.nu must be >= 0");
    }
    if (stop_mode != StopMode::fixed_steps && !(nu > 0.0)) {
        throw std::invalid_argument("inner.nu must be > 0 when the stop mode uses the gradient norm");
    }
    if (max_steps < 1) {
        throw std::invalid_argument("inner.steps must be >= 1");
    }
    if (traj_batch_size < 1) {
        throw std::invalid_argument("inner.batch must be >= 1");
    }
    if (grad_norm_step_limit < 1) {
        throw std::invalid_argument("inner.step_limit must be >= 1");
    }
}

GradientOracle policy_gradient_oracle(const TaskMdp& task, const PolicyArch& arch, int batch_size) {
    return [&task, &arch, batch_size](const ParamVector& theta, Rng& rng) {
        const TrajectoryBatch batch = sample_batch(task, arch, theta, batch_size, rng);
        ValueGradEstimate est;
        est.grad = batch_gradient(task, arch, theta, batch);
        est.value = batch_value(task, batch);
        est.trajectories = batch_size;
        return est;
    };
}

GradientOracle quadratic_oracle(double a, double b) {
    return [a, b](const ParamVector& theta, Rng&) {
        ValueGradEstimate est;
        est.grad = b - a * theta.array();
        est.value = -0.5 * a * theta.squaredNorm() + b * theta.sum();
        return est;
    };
}

double surrogate_value(double batch_value, const ParamVector& theta, const ParamVector& w,
                       double lambda) {
    check_same_dim(theta, w, "surrogate_value");
    return batch_value - 0.5 * lambda * (theta - w).squaredNorm();
}

ParamVector surrogate_gradient(const ParamVector& batch_grad, const ParamVector& theta,
                               const ParamVector& w, double lambda) {
    check_same_dim(theta, w, "surrogate_gradient");
    check_same_dim(batch_grad, theta, "surrogate_gradient");
    return batch_grad - lambda * (theta - w);
}

ParamVector envelope_grad_estimate(const ParamVector& theta_tilde, const ParamVector& w,
                                   double lambda) {
    check_same_dim(theta_tilde, w, "envelope_grad_estimate");
    return lambda * (theta_tilde - w);
}

ParamVector exact_envelope_solution_quadratic(double a, double b, const ParamVector& w,
                                              double lambda) {
    if (!(a > 0.0)) {
        throw std::invalid_argument("exact_envelope_solution_quadratic: a must be > 0");
    }
    return (b + lambda * w.array()) / (a + lambda);
}

InnerResult inner_solve(const GradientOracle& oracle, const ParamVector& w, const InnerConfig& cfg,
                        Rng& rng, std::vector<InnerTraceRow>* trace) {
    cfg.validate();
    require_finite(w, "inner_solve");

    InnerResult result;
    result.theta = w;
    int k = 0;
    for (;;) {
        if (cfg.stop_mode != StopMode::grad_norm && k == cfg.max_steps) {
            break;
        }
        const ValueGradEstimate est = oracle(result.theta, rng);
        result.trajectories_used += est.trajectories;
        const ParamVector step_dir = surrogate_gradient(est.grad, result.theta, w, cfg.lambda);
        result.final_grad_norm = step_dir.norm();
        if (trace != nullptr) {
            trace->push_back(
                {k, surrogate_value(est.value, result.theta, w, cfg.lambda), result.final_grad_norm});
        }
        if (cfg.stop_mode != StopMode::fixed_steps && result.final_grad_norm <= cfg.nu) {
            break;
        }
        if (cfg.stop_mode == StopMode::grad_norm && k >= cfg.grad_norm_step_limit) {
            throw std::runtime_error("inner_solve: gradient norm " +
                                     std::to_string(result.final_grad_norm) +
                                     " still above tolerance after " + std::to_string(k) + " steps");
        }
        result.theta += cfg.beta * step_dir;
        ++k;
        if (!result.theta.allFinite()) {
            throw DivergenceError(k, "non-finite parameter");
        }
        if (result.theta.cwiseAbs().maxCoeff() > kDivergenceMagnitude) {
            throw DivergenceError(k, "parameter magnitude above 1e6");
        }
    }
    result.steps_taken = k;
    return result;
}

InnerResult inner_solve(const TaskMdp& task, const PolicyArch& arch, const ParamVector& w,
                        const InnerConfig& cfg, Rng& rng, std::vector<InnerTraceRow>* trace) {
    if (w.size() != arch.param_dim()) {
        throw std::invalid_argument("inner_solve: parameter dimension mismatch");
    }
    return inner_solve(policy_gradient_oracle(task, arch, cfg.traj_batch_size), w, cfg, rng, trace);
}

} // namespace memrl
