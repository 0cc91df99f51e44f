#include "memrl/envs/line_world.hpp"

#include <algorithm>
#include <stdexcept>

namespace memrl::envs {

TaskMdp to_task_mdp(const LineTask& task) {
    const int n = static_cast<int>(task.arrival_reward.size());
    if (n < 2) {
        throw std::invalid_argument("line world: need at least two states");
    }
    TaskMdp::Spec spec;
    spec.state_count = n;
    spec.action_count = 2;
    spec.initial_dist.assign(n, 1.0 / n);
    spec.transitions.resize(static_cast<std::size_t>(n) * 2);
    spec.rewards.resize(static_cast<std::size_t>(n) * 2);
    double bound = 0.0;
    for (double r : task.arrival_reward) {
        bound = std::max(bound, r);
    }
    for (StateId s = 0; s < n; ++s) {
        for (ActionId a = 0; a < 2; ++a) {
            const StateId next = std::clamp(s + (a == 0 ? -1 : 1), 0, n - 1);
            spec.transitions[s * 2 + a] = {{next, 1.0}};
            spec.rewards[s * 2 + a] = task.arrival_reward[next];
        }
    }
    spec.horizon = task.horizon;
    spec.discount = task.discount;
    spec.reward_bound = bound > 0.0 ? bound : 1.0;
    return TaskMdp(std::move(spec));
}

TaskDistribution line_world_pair(int horizon, double gamma) {
    // Both tasks favour the right end, with different shaping, so the
    // shared optimum is a deterministic policy.
    LineTask far{{0.0, 0.0, 0.0, 1.0}, horizon, gamma};
    LineTask shaped{{0.0, 0.0, 0.5, 1.0}, horizon, gamma};
    std::vector<NamedTask> tasks;
    tasks.push_back({"line_far", to_task_mdp(far)});
    tasks.push_back({"line_shaped", to_task_mdp(shaped)});
    return TaskDistribution::uniform(std::move(tasks));
}

TaskMdp two_state_task(int horizon, double gamma) {
    TaskMdp::Spec spec;
    spec.state_count = 2;
    spec.action_count = 2;
    spec.initial_dist = {0.6, 0.4};
    // index s * 2 + a; action 0 tends to stay, action 1 tends to switch
    spec.transitions = {
        {{0, 0.8}, {1, 0.2}},
        {{0, 0.3}, {1, 0.7}},
        {{1, 0.9}, {0, 0.1}},
        {{1, 0.25}, {0, 0.75}},
    };
    spec.rewards = {0.1, 0.7, 1.0, 0.3};
    spec.horizon = horizon;
    spec.discount = gamma;
    spec.reward_bound = 1.0;
    return TaskMdp(std::move(spec));
}

} // namespace memrl::envs
