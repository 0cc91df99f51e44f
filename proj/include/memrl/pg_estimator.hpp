#pragma once

#include "memrl/mdp.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace memrl {

/// D trajectories sampled from one task under `source_params`.
struct TrajectoryBatch {
    std::vector<Trajectory> trajectories;
    ParamVector source_params;
};

struct ScoreOptions {
    /// Subtracted from every reward-to-go weight. Off by default; the
    /// analyzed estimator has no baseline.
    double constant_baseline = 0.0;
};

TrajectoryBatch sample_batch(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                             int batch_size, Rng& rng);

/// g(tau) = sum_h grad log pi(a^h|s^h) * R^h(tau).
ParamVector score_gradient(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                           const Trajectory& traj, const ScoreOptions& options = {});

/// Mean of score_gradient over the batch (fixed summation order).
ParamVector batch_gradient(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                           const TrajectoryBatch& batch, const ScoreOptions& options = {});

/// Mean discounted return of the batch (the stochastic value estimate).
double batch_value(const TaskMdp& task, const TrajectoryBatch& batch);

inline constexpr std::size_t kEnumerationBudget = 1'000'000;

/// Calls visit(trajectory, probability) for every trajectory with positive
/// probability. Throws std::length_error past kEnumerationBudget paths.
void enumerate_trajectories(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params,
                            const std::function<void(const Trajectory&, double)>& visit,
                            std::size_t budget = kEnumerationBudget);

/// Exact J(params) by exhaustive enumeration.
double exact_value(const TaskMdp& task, const PolicyArch& arch, const ParamVector& params);

/// Exact grad J(params) = sum_tau q(tau) g(tau) by exhaustive enumeration.
ParamVector exact_policy_gradient(const TaskMdp& task, const PolicyArch& arch,
                                  const ParamVector& params);

} // namespace memrl
