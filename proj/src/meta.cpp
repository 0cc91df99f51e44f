#include "memrl/meta.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <thread>

namespace memrl {

namespace {

// Stream tags for Rng::split.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kEvalStream = 2;

// Runs fn(0..n-1) on up to `threads` workers. Exceptions are collected per index.
template <typename Fn>
std::vector<std::exception_ptr> parallel_for(int n, int threads, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    auto run_one = [&](int i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const int workers = std::min(n, std::max(threads, 1));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) {
            run_one(i);
        }
        return errors;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int j = 0; j < workers; ++j) {
        pool.emplace_back([&, j] {
            for (int i = j; i < n; i += workers) {
                run_one(i);
            }
        });
    }
    pool.clear(); // joins
    return errors;
}

void rethrow_first(const std::vector<std::exception_ptr>& errors, int iteration,
                   const std::vector<std::string>& task_ids) {
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) {
            continue;
        }
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw TrainingError(iteration, task_ids[i], e.what());
        }
    }
}

void check_thetas(const ParamVector& w, std::span<const ParamVector> thetas, const char* what) {
    if (thetas.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty theta set");
    }
    for (const auto& theta : thetas) {
        if (theta.size() != w.size()) {
            throw std::invalid_argument(std::string(what) + ": dimension mismatch");
        }
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

TaskDistribution::TaskDistribution(std::vector<NamedTask> tasks, std::vector<double> weights)
    : tasks_(std::move(tasks)), weights_(std::move(weights)) {
    if (tasks_.empty()) {
        throw std::invalid_argument("task distribution: no tasks");
    }
    if (weights_.size() != tasks_.size()) {
        throw std::invalid_argument("task distribution: one weight per task required");
    }
    double total = 0.0;
    for (double p : weights_) {
        if (p < 0.0) {
            throw std::invalid_argument("task distribution: negative weight");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("task distribution: weights do not sum to 1");
    }
    const int n_states = tasks_.front().mdp.state_count();
    const int n_actions = tasks_.front().mdp.action_count();
    for (const auto& t : tasks_) {
        if (t.mdp.state_count() != n_states || t.mdp.action_count() != n_actions) {
            throw std::invalid_argument("task distribution: tasks must share state/action spaces");
        }
    }
}

TaskDistribution TaskDistribution::uniform(std::vector<NamedTask> tasks) {
    const std::size_t n = tasks.size();
    std::vector<double> weights(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
    return TaskDistribution(std::move(tasks), std::move(weights));
}

std::vector<int> sample_task_batch(const TaskDistribution& dist, int batch_size, Rng& rng) {
    if (batch_size < 1) {
        throw std::invalid_argument("sample_task_batch: batch size must be >= 1");
    }
    std::vector<int> batch(batch_size);
    for (auto& id : batch) {
        id = static_cast<int>(rng.categorical(dist.weights()));
    }
    return batch;
}

ParamVector meta_update(const ParamVector& w, std::span<const ParamVector> thetas, double alpha,
                        double lambda) {
    check_thetas(w, thetas, "meta_update");
    const double mix = alpha * lambda;
    const double B = static_cast<double>(thetas.size());
    if (mix == 1.0) {
        ParamVector sum = ParamVector::Zero(w.size());
        for (const auto& theta : thetas) {
            sum += theta;
        }
        return sum / B;
    }
    // same convex combination written as w + mix * mean(theta - w); exact at theta = w
    ParamVector dev = ParamVector::Zero(w.size());
    for (const auto& theta : thetas) {
        dev += theta - w;
    }
    return w + (mix / B) * dev;
}

ParamVector aggregated_envelope_grad(const ParamVector& w, std::span<const ParamVector> thetas,
                                     double lambda) {
    check_thetas(w, thetas, "aggregated_envelope_grad");
    ParamVector sum = ParamVector::Zero(w.size());
    for (const auto& theta : thetas) {
        sum += envelope_grad_estimate(theta, w, lambda);
    }
    return sum / static_cast<double>(thetas.size());
}

ParamVector meta_update_gradient_form(const ParamVector& w, std::span<const ParamVector> thetas,
                                      double alpha, double lambda) {
    return w + alpha * aggregated_envelope_grad(w, thetas, lambda);
}

std::string to_string(AlphaSchedule schedule) {
    return schedule == AlphaSchedule::constant ? "constant" : "inverse_sqrt_T";
}

AlphaSchedule alpha_schedule_from_string(const std::string& name) {
    if (name == "constant") {
        return AlphaSchedule::constant;
    }
    if (name == "inverse_sqrt_T") {
        return AlphaSchedule::inverse_sqrt_T;
    }
    throw std::invalid_argument("unknown alpha schedule '" + name + "'");
}

void TrainConfig::validate() const {
    inner.validate();
    if (alpha_schedule == AlphaSchedule::constant && !(alpha > 0.0)) {
        throw std::invalid_argument("meta.alpha must be > 0");
    }
    if (task_batch_size < 1) {
        throw std::invalid_argument("meta.task_batch must be >= 1");
    }
    if (total_iterations < 0) {
        throw std::invalid_argument("iters must be >= 0");
    }
    if (eval_every < 1) {
        throw std::invalid_argument("output.eval_every must be >= 1");
    }
    if (eval_rollouts < 1) {
        throw std::invalid_argument("output.eval_rollouts must be >= 1");
    }
    if (threads < 1) {
        throw std::invalid_argument("threads must be >= 1");
    }
    if (!(init_std >= 0.0)) {
        throw std::invalid_argument("policy.init_std must be >= 0");
    }
    if (!(early_stop_threshold >= 0.0)) {
        throw std::invalid_argument("meta.early_stop must be >= 0");
    }
}

double TrainConfig::effective_alpha() const {
    if (alpha_schedule == AlphaSchedule::inverse_sqrt_T) {
        return 1.0 / (2.0 * std::sqrt(static_cast<double>(std::max(total_iterations, 1))));
    }
    return alpha;
}

EvalRecord evaluate_adapted(const TaskMdp& task, const PolicyArch& arch, const ParamVector& w,
                            const InnerConfig& inner, int rollouts, Rng& rng) {
    if (rollouts < 1) {
        throw std::invalid_argument("evaluate_adapted: need at least one rollout");
    }
    Rng adapt_rng = rng.split(0);
    Rng rollout_rng = rng.split(1);
    Rng greedy_rng = rng.split(2);

    const InnerResult adapted = inner_solve(task, arch, w, inner, adapt_rng);

    EvalRecord rec;
    rec.inner_steps = adapted.steps_taken;
    rec.theta = adapted.theta;
    std::vector<double> returns(rollouts);
    int reached = 0;
    for (int i = 0; i < rollouts; ++i) {
        const Trajectory traj = sample_trajectory(task, arch, adapted.theta, rollout_rng);
        returns[i] = discounted_return(traj, task.discount());
        reached += reached_goal(task, traj) ? 1 : 0;
    }
    double mean = 0.0;
    for (double r : returns) {
        mean += r;
    }
    mean /= rollouts;
    double var = 0.0;
    for (double r : returns) {
        var += (r - mean) * (r - mean);
    }
    rec.adapted_return_mean = mean;
    rec.adapted_return_std = rollouts > 1 ? std::sqrt(var / (rollouts - 1)) : 0.0;
    rec.reach_fraction = static_cast<double>(reached) / rollouts;
    const Trajectory greedy =
        sample_trajectory(task, arch, adapted.theta, greedy_rng, ActionSelection::greedy);
    rec.greedy_return = discounted_return(greedy, task.discount());
    return rec;
}

ParamVector initial_meta_params(const PolicyArch& arch, const TrainConfig& cfg) {
    Rng init = Rng(cfg.seed).split(kInitStream);
    return init_params(arch, cfg.init_std, init);
}

MetaState run_training(const TaskDistribution& dist, const PolicyArch& arch, const TrainConfig& cfg,
                       MetricsSink* sink, const std::optional<ParamVector>& initial_w) {
    cfg.validate();
    arch.validate();
    if (arch.state_count != dist.task(0).mdp.state_count() ||
        arch.action_count != dist.task(0).mdp.action_count()) {
        throw std::invalid_argument("run_training: policy does not match task spaces");
    }
    const double alpha = cfg.effective_alpha();
    const double lambda = cfg.inner.lambda;
    if (alpha * lambda > 1.0) {
        std::clog << "warning: alpha*lambda = " << alpha * lambda
                  << " > 1; the meta-update is not a convex combination\n";
    }

    MetaState state;
    state.rng = Rng(cfg.seed);
    state.w = initial_w ? *initial_w : initial_meta_params(arch, cfg);
    if (state.w.size() != arch.param_dim()) {
        throw std::invalid_argument("run_training: initial parameters have wrong dimension");
    }
    require_finite(state.w, "run_training");

    const int T = cfg.total_iterations;
    if (T == 0) {
        return state;
    }

    std::vector<std::string> all_ids;
    for (const auto& t : dist.tasks()) {
        all_ids.push_back(t.id);
    }
    const auto start = std::chrono::steady_clock::now();
    const int n_tasks = static_cast<int>(dist.size());
    double grad_sq_sum = 0.0;

    auto evaluate_all = [&](int t) {
        std::vector<EvalRecord> recs(n_tasks);
        const Rng eval_root = state.rng.split(kEvalStream).split(static_cast<std::uint64_t>(t));
        auto errors = parallel_for(n_tasks, cfg.threads, [&](int i) {
            Rng rng = eval_root.split(static_cast<std::uint64_t>(i));
            recs[i] = evaluate_adapted(dist.task(i).mdp, arch, state.w, cfg.inner,
                                       cfg.eval_rollouts, rng);
            recs[i].iteration = t;
            recs[i].task_index = i;
            recs[i].task_id = dist.task(i).id;
        });
        rethrow_first(errors, t, all_ids);
        return recs;
    };

    auto emit_eval = [&](int t, std::vector<EvalRecord>& recs, double grad_sq) {
        if (sink == nullptr) {
            return;
        }
        const double now = elapsed_ms(start);
        for (auto& rec : recs) {
            rec.envelope_grad_sq_norm = grad_sq;
            rec.wall_ms = now;
            sink->on_eval(rec);
        }
        sink->on_checkpoint(t, state.w);
    };

    for (int t = 0; t < T; ++t) {
        const bool eval_now = t % cfg.eval_every == 0;
        std::vector<EvalRecord> evals;
        if (eval_now) {
            evals = evaluate_all(t);
        }

        const Rng round = state.rng.split(kTrainStream).split(static_cast<std::uint64_t>(t));
        Rng batch_rng = round.split(0);
        const std::vector<int> batch = sample_task_batch(dist, cfg.task_batch_size, batch_rng);

        std::vector<ParamVector> thetas(batch.size());
        std::vector<int> steps(batch.size());
        std::vector<std::vector<InnerTraceRow>> traces(cfg.collect_inner_traces ? batch.size() : 0);
        std::vector<std::string> batch_ids;
        for (int id : batch) {
            batch_ids.push_back(dist.task(id).id);
        }
        auto errors = parallel_for(static_cast<int>(batch.size()), cfg.threads, [&](int b) {
            Rng rng = round.split(1 + static_cast<std::uint64_t>(b));
            InnerResult res = inner_solve(dist.task(batch[b]).mdp, arch, state.w, cfg.inner, rng,
                                          cfg.collect_inner_traces ? &traces[b] : nullptr);
            thetas[b] = std::move(res.theta);
            steps[b] = res.steps_taken;
        });
        rethrow_first(errors, t, batch_ids);

        IterationRecord rec;
        rec.iteration = t;
        rec.task_batch = batch;
        rec.inner_steps = steps;
        rec.envelope_grad_sq_norm = aggregated_envelope_grad(state.w, thetas, lambda).squaredNorm();
        rec.wall_ms = elapsed_ms(start);
        rec.inner_traces = std::move(traces);

        if (eval_now) {
            emit_eval(t, evals, rec.envelope_grad_sq_norm);
        }

        state.w = meta_update(state.w, thetas, alpha, lambda);
        require_finite(state.w, "meta_update");
        state.iteration = t + 1;
        grad_sq_sum += rec.envelope_grad_sq_norm;
        if (sink != nullptr) {
            sink->on_iteration(rec);
        }
        state.history.push_back(std::move(rec));

        if (cfg.early_stop_threshold > 0.0 &&
            grad_sq_sum / static_cast<double>(t + 1) < cfg.early_stop_threshold) {
            break;
        }
    }

    std::vector<EvalRecord> final_evals = evaluate_all(state.iteration);
    emit_eval(state.iteration, final_evals, std::numeric_limits<double>::quiet_NaN());
    return state;
}

} // namespace memrl
