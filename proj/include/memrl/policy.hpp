#pragma once

#include "memrl/rng.hpp"
#include "memrl/types.hpp"

#include <Eigen/Core>
#include <string>

namespace memrl {

enum class PolicyKind { tabular_softmax, mlp_softmax };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/**
 * Softmax policy architecture.
 *
 * Tabular: one logit per (state, action), laid out state-major, so the
 * parameter dimension is state_count * action_count.
 *
 * MLP: logits = W2 tanh(W1 x + b1) + b2 where x is the feature row of the
 * state. Parameters are packed as [W1 (row-major, hidden x in), b1,
 * W2 (row-major, actions x hidden), b2].
 */
struct PolicyArch {
    PolicyKind kind = PolicyKind::tabular_softmax;
    int state_count = 0;
    int action_count = 0;
    int hidden_width = 32;
    Eigen::MatrixXd state_features; // state_count x feature_dim, MLP only

    static PolicyArch tabular(int state_count, int action_count);
    static PolicyArch mlp(Eigen::MatrixXd state_features, int action_count, int hidden_width);

    int feature_dim() const { return static_cast<int>(state_features.cols()); }
    int param_dim() const;

    /// Throws std::invalid_argument on inconsistent shapes.
    void validate() const;
};

/// Softmax over the logits of `state`; sums to one.
Eigen::VectorXd action_distribution(const PolicyArch& arch, const ParamVector& params, StateId state);

/// Gradient of log pi(action | state; params) with respect to params.
ParamVector log_prob_grad(const PolicyArch& arch, const ParamVector& params, StateId state,
                          ActionId action);

/// out += scale * log_prob_grad(...). Avoids a temporary in the estimator loops.
void accumulate_log_prob_grad(const PolicyArch& arch, const ParamVector& params, StateId state,
                              ActionId action, double scale, ParamVector& out);

double log_prob(const PolicyArch& arch, const ParamVector& params, StateId state, ActionId action);

/// Certified bound G on ||grad log pi||. Only available for tabular softmax.
double log_prob_grad_norm_bound(const PolicyArch& arch);

/// Certified bound on the spectral norm of the Hessian of log pi (tabular softmax).
double log_prob_hessian_norm_bound(const PolicyArch& arch);

/// i.i.d. Gaussian initialization with standard deviation `stddev`.
ParamVector init_params(const PolicyArch& arch, double stddev, Rng& rng);

} // namespace memrl
