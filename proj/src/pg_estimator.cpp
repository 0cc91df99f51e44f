#include "memrl/pg_estimator.hpp"

#include <stdexcept>

namespace memrl {

TrajectoryBatch sample_batch(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                             int batch_size, Rng& rng) {
    if (batch_size < 1) {
        throw std::invalid_argument("sample_batch: batch size must be at least 1");
    }
    TrajectoryBatch batch;
    batch.source_params = params;
    batch.trajectories.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        batch.trajectories.push_back(sample_trajectory(task, arch, params, rng));
    }
    return batch;
}

ParamVector score_gradient(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                           const Trajectory& traj, const ScoreOptions& options) {
    if (params.size() != arch.param_dim()) {
        throw std::invalid_argument("score_gradient: parameter dimension mismatch");
    }
    if (traj.steps.empty()) {
        throw std::invalid_argument("score_gradient: empty trajectory");
    }
    ParamVector grad = ParamVector::Zero(params.size());
    const std::vector<double> to_go = partial_returns(traj, task.discount());
    for (int h = 0; h < traj.length(); ++h) {
        const double weight = to_go[h] - options.constant_baseline;
        if (weight == 0.0) {
            continue;
        }
        accumulate_log_prob_grad(arch, params, traj.steps[h].state, traj.steps[h].action, weight,
                                 grad);
    }
    return grad;
}

ParamVector batch_gradient(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                           const TrajectoryBatch& batch, const ScoreOptions& options) {
    if (batch.trajectories.empty()) {
        throw std::invalid_argument("batch_gradient: empty batch");
    }
    if (batch.source_params.size() != params.size() || batch.source_params != params) {
        throw std::invalid_argument("batch_gradient: batch was sampled under different parameters");
    }
    ParamVector sum = ParamVector::Zero(params.size());
    for (const auto& traj : batch.trajectories) {
        sum += score_gradient(task, arch, params, traj, options);
    }
    return sum / static_cast<double>(batch.trajectories.size());
}

double batch_value(const TaskMdp& task, const TrajectoryBatch& batch) {
    if (batch.trajectories.empty()) {
        throw std::invalid_argument("batch_value: empty batch");
    }
    double sum = 0.0;
    for (const auto& traj : batch.trajectories) {
        sum += discounted_return(traj, task.discount());
    }
    return sum / static_cast<double>(batch.trajectories.size());
}

namespace {

struct Enumerator {
    const TaskMdp& task;
    const PolicyArch& arch;
    const ParamVector& params;
    const std::function<void(const Trajectory&, double)>& visit;
    std::size_t budget;
    std::size_t visited = 0;
    Trajectory traj;

    void emit(StateId last, double prob) {
        if (++visited > budget) {
            throw std::length_error("task too large for exact oracle");
        }
        traj.terminal_state = last;
        visit(traj, prob);
    }

    void expand(StateId s, int h, double prob) {
        const Eigen::VectorXd pi = action_distribution(arch, params, s);
        for (ActionId a = 0; a < task.action_count(); ++a) {
            if (pi[a] <= 0.0) {
                continue;
            }
            traj.steps.push_back({s, a, task.reward(s, a)});
            for (const auto& t : task.transitions(s, a)) {
                if (t.prob <= 0.0) {
                    continue;
                }
                const double p = prob * pi[a] * t.prob;
                if (h + 1 == task.horizon() || episode_ends_after(task, h, s, t.next)) {
                    emit(t.next, p);
                } else {
                    expand(t.next, h + 1, p);
                }
            }
            traj.steps.pop_back();
        }
    }
};

} // namespace

void enumerate_trajectories(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                            const std::function<void(const Trajectory&, double)>& visit,
                            std::size_t budget) {
    if (params.size() != arch.param_dim()) {
        throw std::invalid_argument("enumerate_trajectories: parameter dimension mismatch");
    }
    Enumerator e{task, arch, params, visit, budget};
    e.traj.steps.reserve(task.horizon());
    const auto& mu = task.initial_dist();
    for (StateId s = 0; s < task.state_count(); ++s) {
        if (mu[s] > 0.0) {
            e.expand(s, 0, mu[s]);
        }
    }
}

double exact_value(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params) {
    double value = 0.0;
    enumerate_trajectories(task, arch, params, [&](const Trajectory& traj, double prob) {
        value += prob * discounted_return(traj, task.discount());
    });
    return value;
}

ParamVector exact_policy_gradient(const TaskMdp& task, const PolicyArch& arch,
                                  const ParamVector& params) {
    ParamVector grad = ParamVector::Zero(params.size());
    enumerate_trajectories(task, arch, params, [&](const Trajectory& traj, double prob) {
        grad += prob * score_gradient(task, arch, params, traj);
    });
    return grad;
}

} // namespace memrl
