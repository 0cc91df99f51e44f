#pragma once

#include "memrl/policy.hpp"
#include "memrl/rng.hpp"
#include "memrl/types.hpp"

#include <vector>

namespace memrl {

struct Transition {
    StateId next;
    double prob;
};

/**
 * Finite-horizon tabular MDP (one task).
 *
 * Rewards are a function of (state, action) and lie in [0, reward_bound].
 * Transition rows are stored sparsely and must each sum to one.
 *
 * Episodes are truncated by `terminal`: after the step taken from a
 * terminal start state, or after any step that lands in a terminal state,
 * the episode ends and the remaining steps contribute nothing. `goal`
 * marks states counted as "reached" by evaluation; it does not affect
 * the dynamics.
 */
class TaskMdp {
public:
    struct Spec {
        int state_count = 0;
        int action_count = 0;
        std::vector<double> initial_dist;                 // size state_count
        std::vector<std::vector<Transition>> transitions; // index state * action_count + action
        std::vector<double> rewards;                      // index state * action_count + action
        int horizon = 1;
        double discount = 0.99;
        double reward_bound = 1.0;
        std::vector<bool> terminal; // empty: no truncation
        std::vector<bool> goal;     // empty: no goal states
    };

    explicit TaskMdp(Spec spec);

    int state_count() const { return spec_.state_count; }
    int action_count() const { return spec_.action_count; }
    int horizon() const { return spec_.horizon; }
    double discount() const { return spec_.discount; }
    double reward_bound() const { return spec_.reward_bound; }

    const std::vector<double>& initial_dist() const { return spec_.initial_dist; }
    const std::vector<Transition>& transitions(StateId s, ActionId a) const;
    double transition_prob(StateId s, ActionId a, StateId next) const;
    double reward(StateId s, ActionId a) const;
    bool is_terminal(StateId s) const;
    bool is_goal(StateId s) const;
    bool has_terminal_states() const { return !spec_.terminal.empty(); }

    const Spec& spec() const { return spec_; }

private:
    void check_state(StateId s) const;
    void check_action(ActionId a) const;

    Spec spec_;
};

struct Step {
    StateId state;
    ActionId action;
    double reward;
};

struct Trajectory {
    std::vector<Step> steps;
    StateId terminal_state = 0;

    int length() const { return static_cast<int>(steps.size()); }
    /// s^h for h in [0, length]; s^length is terminal_state.
    StateId state_at(int h) const;
};

/// sum_h gamma^h r_h
double discounted_return(const Trajectory& traj, double gamma);

/// Reward-to-go with absolute-time weights: sum_{l >= h} gamma^l r_l.
double partial_return(const Trajectory& traj, int h, double gamma);

/// All reward-to-go values R^0..R^{len-1} in one backward pass.
std::vector<double> partial_returns(const Trajectory& traj, double gamma);

enum class ActionSelection { stochastic, greedy };

/// Rolls out one episode of at most task.horizon() steps.
Trajectory sample_trajectory(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                             Rng& rng, ActionSelection selection = ActionSelection::stochastic);

/// Same as sample_trajectory but from a fixed start state.
Trajectory sample_trajectory_from(const TaskMdp& task, const PolicyArch& arch,
                                  const ParamVector& params, StateId start, Rng& rng,
                                  ActionSelection selection = ActionSelection::stochastic);

/// log mu(s^0) + sum_h log pi(a^h|s^h) + sum_h log P(s^{h+1}|s^h,a^h).
double trajectory_log_prob(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                           const Trajectory& traj);

/// True if the episode ends after step h (0-based) given s^h and s^{h+1}.
bool episode_ends_after(const TaskMdp& task, int h, StateId from, StateId to);

/// True if any visited state (including s^0 and the terminal state) is a goal.
bool reached_goal(const TaskMdp& task, const Trajectory& traj);

} // namespace memrl
