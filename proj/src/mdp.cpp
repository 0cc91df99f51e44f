#include "memrl/mdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace memrl {

namespace {
constexpr double kRowTolerance = 1e-12;
}

TaskMdp::TaskMdp(Spec spec) : spec_(std::move(spec)) {
    const int n_states = spec_.state_count;
    const int n_actions = spec_.action_count;
    if (n_states <= 0 || n_actions <= 0) {
        throw std::invalid_argument("task: state and action counts must be positive");
    }
    if (spec_.horizon < 1) {
        throw std::invalid_argument("task: horizon must be at least 1");
    }
    if (!(spec_.discount > 0.0 && spec_.discount < 1.0)) {
        throw std::invalid_argument("task: discount must lie in (0, 1)");
    }
    if (!(spec_.reward_bound > 0.0)) {
        throw std::invalid_argument("task: reward bound must be positive");
    }
    const auto pairs = static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions);
    if (spec_.initial_dist.size() != static_cast<std::size_t>(n_states)) {
        throw std::invalid_argument("task: initial distribution has wrong size");
    }
    if (spec_.transitions.size() != pairs || spec_.rewards.size() != pairs) {
        throw std::invalid_argument("task: transition/reward tables have wrong size");
    }
    if (!spec_.terminal.empty() && spec_.terminal.size() != static_cast<std::size_t>(n_states)) {
        throw std::invalid_argument("task: terminal flags have wrong size");
    }
    if (!spec_.goal.empty() && spec_.goal.size() != static_cast<std::size_t>(n_states)) {
        throw std::invalid_argument("task: goal flags have wrong size");
    }

    double mass = 0.0;
    for (double p : spec_.initial_dist) {
        if (p < 0.0) {
            throw std::invalid_argument("task: negative initial probability");
        }
        mass += p;
    }
    if (std::abs(mass - 1.0) > kRowTolerance) {
        throw std::invalid_argument("task: initial distribution does not sum to 1");
    }
    for (std::size_t i = 0; i < pairs; ++i) {
        double row = 0.0;
        for (const auto& t : spec_.transitions[i]) {
            if (t.next < 0 || t.next >= n_states || t.prob < 0.0) {
                throw std::invalid_argument("task: invalid transition entry");
            }
            row += t.prob;
        }
        if (std::abs(row - 1.0) > kRowTolerance) {
            throw std::invalid_argument("task: transition row " + std::to_string(i) +
                                        " does not sum to 1");
        }
        const double r = spec_.rewards[i];
        if (!(r >= 0.0 && r <= spec_.reward_bound)) {
            throw std::invalid_argument("task: reward outside [0, reward_bound]");
        }
    }
}

void TaskMdp::check_state(StateId s) const {
    if (s < 0 || s >= spec_.state_count) {
        throw std::out_of_range("task: state id " + std::to_string(s) + " out of range");
    }
}

void TaskMdp::check_action(ActionId a) const {
    if (a < 0 || a >= spec_.action_count) {
        throw std::out_of_range("task: action id " + std::to_string(a) + " out of range");
    }
}

const std::vector<Transition>& TaskMdp::transitions(StateId s, ActionId a) const {
    check_state(s);
    check_action(a);
    return spec_.transitions[static_cast<std::size_t>(s) * spec_.action_count + a];
}

double TaskMdp::transition_prob(StateId s, ActionId a, StateId next) const {
    double p = 0.0;
    for (const auto& t : transitions(s, a)) {
        if (t.next == next) {
            p += t.prob;
        }
    }
    return p;
}

double TaskMdp::reward(StateId s, ActionId a) const {
    check_state(s);
    check_action(a);
    return spec_.rewards[static_cast<std::size_t>(s) * spec_.action_count + a];
}

bool TaskMdp::is_terminal(StateId s) const {
    check_state(s);
    return !spec_.terminal.empty() && spec_.terminal[s];
}

bool TaskMdp::is_goal(StateId s) const {
    check_state(s);
    return !spec_.goal.empty() && spec_.goal[s];
}

StateId Trajectory::state_at(int h) const {
    if (h < 0 || h > length()) {
        throw std::out_of_range("trajectory: time index out of range");
    }
    return h == length() ? terminal_state : steps[h].state;
}

double discounted_return(const Trajectory& traj, double gamma) {
    if (traj.steps.empty()) {
        throw std::invalid_argument("empty trajectory");
    }
    return partial_return(traj, 0, gamma);
}

double partial_return(const Trajectory& traj, int h, double gamma) {
    if (h < 0 || h >= traj.length()) {
        throw std::out_of_range("partial_return: h out of range");
    }
    double total = 0.0;
    double weight = std::pow(gamma, h);
    for (int l = h; l < traj.length(); ++l) {
        total += weight * traj.steps[l].reward;
        weight *= gamma;
    }
    return total;
}

std::vector<double> partial_returns(const Trajectory& traj, double gamma) {
    const int n = traj.length();
    std::vector<double> out(n);
    std::vector<double> weights(n);
    double w = 1.0;
    for (int l = 0; l < n; ++l) {
        weights[l] = w;
        w *= gamma;
    }
    // backward accumulation; agrees with partial_return up to rounding
    double acc = 0.0;
    for (int l = n - 1; l >= 0; --l) {
        acc += weights[l] * traj.steps[l].reward;
        out[l] = acc;
    }
    return out;
}

bool episode_ends_after(const TaskMdp& task, int h, StateId from, StateId to) {
    if (!task.has_terminal_states()) {
        return false;
    }
    return (h == 0 && task.is_terminal(from)) || task.is_terminal(to);
}

namespace {

StateId sample_next(const TaskMdp& task, StateId s, ActionId a, Rng& rng) {
    const auto& row = task.transitions(s, a);
    if (row.size() == 1) {
        return row.front().next;
    }
    double u = rng.uniform();
    for (const auto& t : row) {
        if (u < t.prob) {
            return t.next;
        }
        u -= t.prob;
    }
    return row.back().next;
}

ActionId argmax_action(const Eigen::VectorXd& probs) {
    Eigen::Index best = 0;
    probs.maxCoeff(&best);
    return static_cast<ActionId>(best);
}

} // namespace

Trajectory sample_trajectory_from(const TaskMdp& task, const PolicyArch& arch,
                                  const ParamVector& params, StateId start, Rng& rng,
                                  ActionSelection selection) {
    if (params.size() != arch.param_dim()) {
        throw std::invalid_argument("sample_trajectory: parameter dimension mismatch");
    }
    Trajectory traj;
    traj.steps.reserve(task.horizon());
    StateId s = start;
    for (int h = 0; h < task.horizon(); ++h) {
        const Eigen::VectorXd probs = action_distribution(arch, params, s);
        const ActionId a = selection == ActionSelection::greedy
                               ? argmax_action(probs)
                               : static_cast<ActionId>(rng.categorical(
                                     std::span<const double>(probs.data(), probs.size())));
        const double r = task.reward(s, a);
        const StateId next = sample_next(task, s, a, rng);
        traj.steps.push_back({s, a, r});
        const bool ends = episode_ends_after(task, h, s, next);
        s = next;
        if (ends) {
            break;
        }
    }
    traj.terminal_state = s;
    return traj;
}

Trajectory sample_trajectory(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                             Rng& rng, ActionSelection selection) {
    const auto& mu = task.initial_dist();
    const auto start = static_cast<StateId>(rng.categorical(mu));
    return sample_trajectory_from(task, arch, params, start, rng, selection);
}

double trajectory_log_prob(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                           const Trajectory& traj) {
    if (traj.steps.empty()) {
        throw std::invalid_argument("trajectory_log_prob: empty trajectory");
    }
    const double mu0 = task.initial_dist().at(traj.steps.front().state);
    if (mu0 <= 0.0) {
        throw std::invalid_argument("inconsistent trajectory");
    }
    double total = std::log(mu0);
    for (int h = 0; h < traj.length(); ++h) {
        const StateId s = traj.steps[h].state;
        const ActionId a = traj.steps[h].action;
        const StateId next = traj.state_at(h + 1);
        const double p = task.transition_prob(s, a, next);
        if (p <= 0.0) {
            throw std::invalid_argument("inconsistent trajectory");
        }
        total += log_prob(arch, params, s, a) + std::log(p);
    }
    return total;
}

bool reached_goal(const TaskMdp& task, const Trajectory& traj) {
    for (const auto& step : traj.steps) {
        if (task.is_goal(step.state)) {
            return true;
        }
    }
    return task.is_goal(traj.terminal_state);
}

} // namespace memrl
