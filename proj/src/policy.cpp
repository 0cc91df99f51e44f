#include "memrl/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace memrl {

void require_finite(const ParamVector& params, const char* what) {
    if (!params.allFinite()) {
        throw std::domain_error(std::string(what) + ": non-finite parameter entry");
    }
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::tabular_softmax:
        return "tabular_softmax";
    case PolicyKind::mlp_softmax:
        return "mlp_softmax";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "tabular_softmax" || name == "tabular") {
        return PolicyKind::tabular_softmax;
    }
    if (name == "mlp_softmax" || name == "mlp") {
        return PolicyKind::mlp_softmax;
    }
    throw std::invalid_argument("unknown policy kind '" + name + "'");
}

PolicyArch PolicyArch::tabular(int state_count, int action_count) {
    PolicyArch arch;
    arch.kind = PolicyKind::tabular_softmax;
    arch.state_count = state_count;
    arch.action_count = action_count;
    arch.hidden_width = 0;
    arch.validate();
    return arch;
}

PolicyArch PolicyArch::mlp(Eigen::MatrixXd state_features, int action_count, int hidden_width) {
    PolicyArch arch;
    arch.kind = PolicyKind::mlp_softmax;
    arch.state_count = static_cast<int>(state_features.rows());
    arch.action_count = action_count;
    arch.hidden_width = hidden_width;
    arch.state_features = std::move(state_features);
    arch.validate();
    return arch;
}

int PolicyArch::param_dim() const {
    if (kind == PolicyKind::tabular_softmax) {
        return state_count * action_count;
    }
    const int in = feature_dim();
    return hidden_width * in + hidden_width + action_count * hidden_width + action_count;
}

void PolicyArch::validate() const {
    if (state_count <= 0 || action_count <= 0) {
        throw std::invalid_argument("policy: state and action counts must be positive");
    }
    if (kind == PolicyKind::mlp_softmax) {
        if (hidden_width <= 0) {
            throw std::invalid_argument("policy: MLP hidden width must be positive");
        }
        if (state_features.rows() != state_count || state_features.cols() == 0) {
            throw std::invalid_argument("policy: MLP needs one feature row per state");
        }
    }
}

namespace {

void check_inputs(const PolicyArch& arch, const ParamVector& params, StateId state) {
    if (params.size() != arch.param_dim()) {
        throw std::invalid_argument("policy: parameter dimension " + std::to_string(params.size()) +
                                    " does not match architecture dimension " +
                                    std::to_string(arch.param_dim()));
    }
    if (state < 0 || state >= arch.state_count) {
        throw std::out_of_range("policy: state id " + std::to_string(state) + " out of range");
    }
}

void softmax_inplace(Eigen::VectorXd& logits) {
    const double top = logits.maxCoeff();
    logits = (logits.array() - top).exp();
    logits /= logits.sum();
}

// Views into the packed MLP parameter vector.
struct MlpView {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1;
    Eigen::Map<const Eigen::VectorXd> b1;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w2;
    Eigen::Map<const Eigen::VectorXd> b2;

    MlpView(const PolicyArch& arch, const ParamVector& p)
        : w1(p.data(), arch.hidden_width, arch.feature_dim()),
          b1(p.data() + arch.hidden_width * arch.feature_dim(), arch.hidden_width),
          w2(p.data() + arch.hidden_width * (arch.feature_dim() + 1), arch.action_count,
             arch.hidden_width),
          b2(p.data() + arch.hidden_width * (arch.feature_dim() + 1 + arch.action_count),
             arch.action_count) {}
};

struct MlpForward {
    Eigen::VectorXd hidden;
    Eigen::VectorXd probs;
};

MlpForward mlp_forward(const PolicyArch& arch, const ParamVector& params, StateId state) {
    const MlpView net(arch, params);
    const Eigen::VectorXd x = arch.state_features.row(state).transpose();
    MlpForward f;
    f.hidden = (net.w1 * x + net.b1).array().tanh();
    f.probs = net.w2 * f.hidden + net.b2;
    softmax_inplace(f.probs);
    return f;
}

} // namespace

Eigen::VectorXd action_distribution(const PolicyArch& arch, const ParamVector& params,
                                    StateId state) {
    check_inputs(arch, params, state);
    if (arch.kind == PolicyKind::tabular_softmax) {
        Eigen::VectorXd probs = params.segment(state * arch.action_count, arch.action_count);
        softmax_inplace(probs);
        return probs;
    }
    return mlp_forward(arch, params, state).probs;
}

double log_prob(const PolicyArch& arch, const ParamVector& params, StateId state, ActionId action) {
    check_inputs(arch, params, state);
    if (action < 0 || action >= arch.action_count) {
        throw std::out_of_range("policy: action id out of range");
    }
    Eigen::VectorXd logits;
    if (arch.kind == PolicyKind::tabular_softmax) {
        logits = params.segment(state * arch.action_count, arch.action_count);
    } else {
        const MlpView net(arch, params);
        const Eigen::VectorXd x = arch.state_features.row(state).transpose();
        const Eigen::VectorXd hidden = (net.w1 * x + net.b1).array().tanh();
        logits = net.w2 * hidden + net.b2;
    }
    const double top = logits.maxCoeff();
    return logits[action] - top - std::log((logits.array() - top).exp().sum());
}

void accumulate_log_prob_grad(const PolicyArch& arch, const ParamVector& params, StateId state,
                              ActionId action, double scale, ParamVector& out) {
    check_inputs(arch, params, state);
    if (action < 0 || action >= arch.action_count) {
        throw std::out_of_range("policy: action id out of range");
    }
    if (out.size() != params.size()) {
        throw std::invalid_argument("policy: gradient accumulator has wrong dimension");
    }
    const int n_actions = arch.action_count;
    if (arch.kind == PolicyKind::tabular_softmax) {
        Eigen::VectorXd probs = params.segment(state * n_actions, n_actions);
        softmax_inplace(probs);
        auto block = out.segment(state * n_actions, n_actions);
        block -= scale * probs;
        block[action] += scale;
        return;
    }

    const MlpForward f = mlp_forward(arch, params, state);
    const MlpView net(arch, params);
    const int in = arch.feature_dim();
    const int hid = arch.hidden_width;

    // d log softmax / d logits = onehot(action) - probs
    Eigen::VectorXd delta = -scale * f.probs;
    delta[action] += scale;

    const Eigen::VectorXd d_hidden = net.w2.transpose() * delta;
    const Eigen::VectorXd d_pre = d_hidden.array() * (1.0 - f.hidden.array().square());
    const Eigen::VectorXd x = arch.state_features.row(state).transpose();

    double* g = out.data();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw1(g, hid, in);
    gw1.noalias() += d_pre * x.transpose();
    Eigen::Map<Eigen::VectorXd>(g + hid * in, hid) += d_pre;
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw2(
        g + hid * (in + 1), n_actions, hid);
    gw2.noalias() += delta * f.hidden.transpose();
    Eigen::Map<Eigen::VectorXd>(g + hid * (in + 1 + n_actions), n_actions) += delta;
}

ParamVector log_prob_grad(const PolicyArch& arch, const ParamVector& params, StateId state,
                          ActionId action) {
    ParamVector grad = ParamVector::Zero(params.size());
    accumulate_log_prob_grad(arch, params, state, action, 1.0, grad);
    return grad;
}

double log_prob_grad_norm_bound(const PolicyArch& arch) {
    if (arch.kind != PolicyKind::tabular_softmax) {
        throw std::invalid_argument("G not certified for MLP");
    }
    // ||e_a - p||^2 = (1 - p_a)^2 + sum_{k != a} p_k^2 <= 2 (1 - p_a)^2 <= 2
    return std::sqrt(2.0);
}

double log_prob_hessian_norm_bound(const PolicyArch& arch) {
    if (arch.kind != PolicyKind::tabular_softmax) {
        throw std::invalid_argument("L not certified for MLP");
    }
    // Hessian block is -(diag(p) - p p^T); Gershgorin row sums are 2 p_k (1 - p_k) <= 1/2.
    return 0.5;
}

ParamVector init_params(const PolicyArch& arch, double stddev, Rng& rng) {
    arch.validate();
    ParamVector params(arch.param_dim());
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        params[i] = stddev * rng.normal();
    }
    return params;
}

} // namespace memrl
