#pragma once

#include "memrl/meta.hpp"

#include <vector>

namespace memrl::envs {

/// Tabular line {0..n-1} with actions left (0) / right (1), clamped at the ends.
/// The reward of a move is arrival_reward[next state].
struct LineTask {
    std::vector<double> arrival_reward;
    int horizon = 4;
    double discount = 0.5;
};

TaskMdp to_task_mdp(const LineTask& task);

/// Two 4-state line tasks used for the stationarity diagnostic.
TaskDistribution line_world_pair(int horizon = 4, double gamma = 0.5);

/// Small stochastic 2-state, 2-action MDP used by the gradient oracles.
TaskMdp two_state_task(int horizon = 2, double gamma = 0.9);

} // namespace memrl::envs
