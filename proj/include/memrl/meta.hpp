#pragma once

#include "memrl/moreau.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memrl {

struct NamedTask {
    std::string id;
    TaskMdp mdp;
};

/// Finite task family with sampling weights.
class TaskDistribution {
public:
    TaskDistribution(std::vector<NamedTask> tasks, std::vector<double> weights);

    static TaskDistribution uniform(std::vector<NamedTask> tasks);

    std::size_t size() const { return tasks_.size(); }
    const NamedTask& task(std::size_t i) const { return tasks_.at(i); }
    const std::vector<NamedTask>& tasks() const { return tasks_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<NamedTask> tasks_;
    std::vector<double> weights_;
};

/// B i.i.d. task indices drawn with replacement.
std::vector<int> sample_task_batch(const TaskDistribution& dist, int batch_size, Rng& rng);

/// (1 - alpha*lambda) w + (alpha*lambda / B) sum_i theta_i
ParamVector meta_update(const ParamVector& w, std::span<const ParamVector> thetas, double alpha,
                        double lambda);

/// w + alpha * mean_i lambda (theta_i - w); algebraically equal to meta_update.
ParamVector meta_update_gradient_form(const ParamVector& w, std::span<const ParamVector> thetas,
                                      double alpha, double lambda);

/// (1/B) sum_i lambda (theta_i - w)
ParamVector aggregated_envelope_grad(const ParamVector& w, std::span<const ParamVector> thetas,
                                     double lambda);

enum class AlphaSchedule { constant, inverse_sqrt_T };

std::string to_string(AlphaSchedule schedule);
AlphaSchedule alpha_schedule_from_string(const std::string& name);

struct TrainConfig {
    InnerConfig inner;
    double alpha = 0.1;
    AlphaSchedule alpha_schedule = AlphaSchedule::constant;
    int task_batch_size = 2;
    int total_iterations = 120;
    int eval_every = 10;
    int eval_rollouts = 10;
    std::uint64_t seed = 0;
    int threads = 1;
    double init_std = 0.1;
    /// Stop once the running mean of ||grad V~||^2 drops below this; 0 disables.
    double early_stop_threshold = 0.0;
    /// Record per-step inner traces of the training solves in IterationRecord.
    bool collect_inner_traces = false;

    void validate() const;
    /// alpha actually applied, after the schedule.
    double effective_alpha() const;
};

struct IterationRecord {
    int iteration = 0;
    std::vector<int> task_batch;
    std::vector<int> inner_steps;
    double envelope_grad_sq_norm = 0.0;
    double wall_ms = 0.0;
    std::vector<std::vector<InnerTraceRow>> inner_traces; // per batch slot, when collected
};

struct EvalRecord {
    int iteration = 0;
    int task_index = 0;
    std::string task_id;
    double adapted_return_mean = 0.0;
    double adapted_return_std = 0.0;
    double reach_fraction = 0.0;
    double greedy_return = 0.0;
    int inner_steps = 0;
    /// ||grad V~(w^t)||^2 of the training step taken at this iteration; NaN after the last one.
    double envelope_grad_sq_norm = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
    ParamVector theta;
};

class MetricsSink {
public:
    virtual ~MetricsSink() = default;
    virtual void on_iteration(const IterationRecord&) {}
    /// Called once per task at every evaluation point, in task order.
    virtual void on_eval(const EvalRecord&) {}
    /// Called with the meta-parameters at every evaluation point.
    virtual void on_checkpoint(int /*iteration*/, const ParamVector& /*w*/) {}
};

struct MetaState {
    ParamVector w;
    int iteration = 0;
    Rng rng;
    std::vector<IterationRecord> history;
};

/// Inner failure annotated with where it happened.
class TrainingError : public std::runtime_error {
public:
    TrainingError(int iteration, const std::string& task_id, const std::string& detail)
        : std::runtime_error("iteration " + std::to_string(iteration) + ", task " + task_id + ": " +
                             detail),
          iteration_(iteration), task_id_(task_id) {}
    int iteration() const { return iteration_; }
    const std::string& task_id() const { return task_id_; }

private:
    int iteration_;
    std::string task_id_;
};

/// Evaluates adaptation from w on one task: fresh inner solve, then rollouts under theta~.
EvalRecord evaluate_adapted(const TaskMdp& task, const PolicyArch& arch, const ParamVector& w,
                            const InnerConfig& inner, int rollouts, Rng& rng);

/// Initial meta-parameters drawn from the configured seed.
ParamVector initial_meta_params(const PolicyArch& arch, const TrainConfig& cfg);

/**
 * Runs cfg.total_iterations meta-iterations. Evaluation happens at
 * t = 0, eval_every, 2*eval_every, ... and at the final iterate. Results
 * are independent of cfg.threads.
 */
MetaState run_training(const TaskDistribution& dist, const PolicyArch& arch, const TrainConfig& cfg,
                       MetricsSink* sink = nullptr,
                       const std::optional<ParamVector>& initial_w = std::nullopt);

} // namespace memrl
