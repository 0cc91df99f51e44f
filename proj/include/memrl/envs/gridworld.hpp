#pragma once

#include "memrl/meta.hpp"

#include <array>
#include <string>
#include <vector>

namespace memrl::envs {

struct GridPos {
    int x = 0;
    int y = 0;
    friend bool operator==(const GridPos&, const GridPos&) = default;
};

/// Action ids follow this order: pause, up, down, right, left.
inline constexpr std::array<GridPos, 5> kNavActions{{{0, 0}, {0, 1}, {0, -1}, {1, 0}, {-1, 0}}};

enum NavAction : ActionId { kPause = 0, kUp = 1, kDown = 2, kRight = 3, kLeft = 4 };

const std::array<GridPos, 5>& nav_actions();

/**
 * Navigation task on {-hw..hw}^2 with reward exp(-||s' - s*||_1), where s'
 * is the state after the move. Moves off the grid clamp to the border.
 */
struct NavTask {
    int half_width = 5;
    GridPos destination;
    int horizon = 30;
    double discount = 0.99;
    bool absorbing = false;

    int side() const { return 2 * half_width + 1; }
    int state_count() const { return side() * side(); }
    bool contains(GridPos p) const;
    StateId state_id(GridPos p) const;
    GridPos position(StateId s) const;
    void validate() const;
};

GridPos nav_step(const NavTask& task, GridPos state, ActionId action);
double nav_reward(const NavTask& task, GridPos state, ActionId action);

/// Tabular view: uniform start over all cells, one-hot transitions.
TaskMdp to_task_mdp(const NavTask& task);

/// Coordinates scaled by 1/half_width, one row per state id.
Eigen::MatrixXd nav_state_features(const NavTask& task);

/// One task per destination, uniform weights. Duplicates only warn.
TaskDistribution build_nav_distribution(const std::vector<GridPos>& destinations, int horizon,
                                        double gamma, bool absorbing = false, int half_width = 5);

std::vector<GridPos> default_nav_destinations();

} // namespace memrl::envs
