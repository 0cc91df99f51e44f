#include "memrl/envs/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace memrl::envs {

const std::array<GridPos, 5>& nav_actions() { return kNavActions; }

bool NavTask::contains(GridPos p) const {
    return std::abs(p.x) <= half_width && std::abs(p.y) <= half_width;
}

StateId NavTask::state_id(GridPos p) const {
    if (!contains(p)) {
        throw std::out_of_range("nav: position outside grid");
    }
    return (p.y + half_width) * side() + (p.x + half_width);
}

GridPos NavTask::position(StateId s) const {
    if (s < 0 || s >= state_count()) {
        throw std::out_of_range("nav: state id out of range");
    }
    return {s % side() - half_width, s / side() - half_width};
}

void NavTask::validate() const {
    if (half_width < 1) {
        throw std::invalid_argument("nav: half width must be >= 1");
    }
    if (!contains(destination)) {
        throw std::invalid_argument("nav: destination outside grid");
    }
    if (horizon < 1) {
        throw std::invalid_argument("nav: horizon must be >= 1");
    }
    if (!(discount > 0.0 && discount < 1.0)) {
        throw std::invalid_argument("nav: discount must lie in (0, 1)");
    }
}

GridPos nav_step(const NavTask& task, GridPos state, ActionId action) {
    if (!task.contains(state)) {
        throw std::out_of_range("nav_step: state outside grid");
    }
    if (action < 0 || action >= static_cast<ActionId>(kNavActions.size())) {
        throw std::out_of_range("nav_step: action id out of range");
    }
    const GridPos d = kNavActions[action];
    return {std::clamp(state.x + d.x, -task.half_width, task.half_width),
            std::clamp(state.y + d.y, -task.half_width, task.half_width)};
}

double nav_reward(const NavTask& task, GridPos state, ActionId action) {
    const GridPos next = nav_step(task, state, action);
    const int l1 = std::abs(next.x - task.destination.x) + std::abs(next.y - task.destination.y);
    return std::exp(-static_cast<double>(l1));
}

TaskMdp to_task_mdp(const NavTask& task) {
    task.validate();
    const int n = task.state_count();
    const int n_actions = static_cast<int>(kNavActions.size());
    TaskMdp::Spec spec;
    spec.state_count = n;
    spec.action_count = n_actions;
    spec.initial_dist.assign(n, 1.0 / n);
    spec.transitions.resize(static_cast<std::size_t>(n) * n_actions);
    spec.rewards.resize(static_cast<std::size_t>(n) * n_actions);
    for (StateId s = 0; s < n; ++s) {
        const GridPos p = task.position(s);
        for (ActionId a = 0; a < n_actions; ++a) {
            const auto idx = static_cast<std::size_t>(s) * n_actions + a;
            spec.transitions[idx] = {{task.state_id(nav_step(task, p, a)), 1.0}};
            spec.rewards[idx] = nav_reward(task, p, a);
        }
    }
    spec.horizon = task.horizon;
    spec.discount = task.discount;
    spec.reward_bound = 1.0;
    spec.goal.assign(n, false);
    spec.goal[task.state_id(task.destination)] = true;
    if (task.absorbing) {
        spec.terminal = spec.goal;
    }
    return TaskMdp(std::move(spec));
}

Eigen::MatrixXd nav_state_features(const NavTask& task) {
    Eigen::MatrixXd features(task.state_count(), 2);
    const double scale = 1.0 / task.half_width;
    for (StateId s = 0; s < task.state_count(); ++s) {
        const GridPos p = task.position(s);
        features(s, 0) = p.x * scale;
        features(s, 1) = p.y * scale;
    }
    return features;
}

TaskDistribution build_nav_distribution(const std::vector<GridPos>& destinations, int horizon,
                                        double gamma, bool absorbing, int half_width) {
    if (destinations.empty()) {
        throw std::invalid_argument("build_nav_distribution: no destinations");
    }
    std::vector<NamedTask> tasks;
    for (std::size_t i = 0; i < destinations.size(); ++i) {
        const GridPos d = destinations[i];
        for (std::size_t j = 0; j < i; ++j) {
            if (destinations[j] == d) {
                std::clog << "warning: duplicate destination (" << d.x << ", " << d.y << ")\n";
            }
        }
        NavTask nav{half_width, d, horizon, gamma, absorbing};
        tasks.push_back({"nav_" + std::to_string(d.x) + "_" + std::to_string(d.y),
                         to_task_mdp(nav)});
    }
    return TaskDistribution::uniform(std::move(tasks));
}

std::vector<GridPos> default_nav_destinations() { return {{2, 2}, {-2, 2}, {0, -1}}; }

} // namespace memrl::envs
