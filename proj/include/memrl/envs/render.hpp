#pragma once

#include "memrl/envs/gridworld.hpp"

#include <string>
#include <vector>

namespace memrl::envs {

struct RolloutPath {
    int task_index = 0;
    std::vector<GridPos> path; // s^0 .. s^len
    bool reached = false;
};

std::vector<GridPos> trajectory_path(const NavTask& task, const Trajectory& traj);

/// Grid with destination stars, one polyline per rollout, a triangle at
/// each start and a pentagon where a rollout ended without arriving.
std::string render_nav_svg(const std::vector<NavTask>& tasks, const std::vector<RolloutPath>& rollouts,
                           int iteration);

/// Plain-text grid: '*' destination, 'S' start, 'E' end, digits for visit order mod 10.
std::string render_nav_text(const NavTask& task, const std::vector<GridPos>& path);

} // namespace memrl::envs
