#include "memrl/app.hpp"

#include "memrl/envs/render.hpp"
#include "memrl/gradcheck.hpp"
#include "memrl/io.hpp"
#include "memrl/theory.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

namespace memrl::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

// Streams metrics, diagnostics, checkpoints and snapshots into the run directory.
class RunWriter : public MetricsSink {
public:
    RunWriter(const RunConfig& cfg, const Experiment& exp, const fs::path& dir)
        : cfg_(cfg), exp_(exp), dir_(dir), metrics_(open_out(dir / "metrics.csv")),
          diagnostics_(open_out(dir / "diagnostics.csv")) {
        metrics_ << io::kMetricsHeader << '\n';
        diagnostics_ << io::kDiagnosticsHeader << '\n';
        if (cfg.trace_inner) {
            trace_ = open_out(dir / "inner_trace.csv");
            trace_ << "iteration,slot,step,surrogate_value,grad_norm\n";
        }
    }

    void on_iteration(const IterationRecord& rec) override {
        grad_sq_sum_ += rec.envelope_grad_sq_norm;
        diagnostics_ << rec.iteration << ',' << io::format_double(rec.envelope_grad_sq_norm) << ','
                     << io::format_double(grad_sq_sum_ / (rec.iteration + 1)) << '\n';
        for (std::size_t slot = 0; slot < rec.inner_traces.size(); ++slot) {
            for (const auto& row : rec.inner_traces[slot]) {
                trace_ << rec.iteration << ',' << slot << ',' << row.step << ','
                       << io::format_double(row.surrogate_value) << ','
                       << io::format_double(row.grad_norm) << '\n';
            }
        }
    }

    void on_eval(const EvalRecord& rec) override {
        metrics_ << io::metrics_row_to_csv(io::metrics_row_from_eval(rec, cfg_.wall_clock)) << '\n';
        pending_.push_back(rec);
    }

    void on_checkpoint(int t, const ParamVector& w) override {
        io::write_checkpoint((dir_ / ("checkpoint_" + std::to_string(t) + ".json")).string(),
                             {exp_.arch, w, t});
        const bool final_point = t == cfg_.iters;
        if (!exp_.nav_tasks.empty() && cfg_.snapshot_every > 0 &&
            (t % cfg_.snapshot_every == 0 || final_point)) {
            write_snapshot(t);
        }
        pending_.clear();
        metrics_.flush();
        diagnostics_.flush();
    }

    void write_snapshot(int t) {
        // one rollout per task from a shared random start
        Rng rng = Rng(cfg_.seed).split(3).split(static_cast<std::uint64_t>(t));
        const auto& first = exp_.nav_tasks.front();
        const auto start = static_cast<StateId>(rng.next_u64() % first.state_count());
        std::vector<envs::RolloutPath> paths;
        std::ofstream jsonl = open_out(dir_ / ("rollouts_t" + std::to_string(t) + ".jsonl"));
        for (const auto& rec : pending_) {
            const auto& task = exp_.dist.task(rec.task_index).mdp;
            Rng roll = rng.split(static_cast<std::uint64_t>(rec.task_index));
            const Trajectory traj = sample_trajectory_from(task, exp_.arch, rec.theta, start, roll);
            jsonl << io::trajectory_to_json_line(traj) << '\n';
            paths.push_back({rec.task_index, envs::trajectory_path(exp_.nav_tasks[rec.task_index], traj),
                             reached_goal(task, traj)});
        }
        std::ofstream svg = open_out(dir_ / ("nav_t" + std::to_string(t) + ".svg"));
        svg << envs::render_nav_svg(exp_.nav_tasks, paths, t);
    }

private:
    const RunConfig& cfg_;
    const Experiment& exp_;
    fs::path dir_;
    std::ofstream metrics_;
    std::ofstream diagnostics_;
    std::ofstream trace_;
    std::vector<EvalRecord> pending_;
    double grad_sq_sum_ = 0.0;
};

void write_run_meta(const RunConfig& cfg, const Experiment& exp, const fs::path& dir) {
    json meta;
    meta["config"] = config_as_map(cfg);
    meta["seed"] = cfg.seed;
    meta["param_dim"] = exp.arch.param_dim();
    std::vector<std::string> ids;
    for (const auto& t : exp.dist.tasks()) {
        ids.push_back(t.id);
    }
    meta["tasks"] = ids;
    json invented;
    if (cfg.env_kind == "nav") {
        std::vector<std::vector<int>> dests;
        for (const auto& d : cfg.destinations) {
            dests.push_back({d.x, d.y});
        }
        invented["destinations"] = dests;
        invented["horizon"] = cfg.horizon;
        invented["absorbing"] = cfg.absorbing;
        invented["initial_state"] = "uniform over all cells";
        invented["boundary"] = "clamp";
    }
    if (cfg.policy == PolicyKind::mlp_softmax) {
        invented["hidden_width"] = cfg.hidden;
        invented["activation"] = "tanh";
        invented["state_encoding"] = "coordinates / half_width";
    }
    invented["init_std"] = cfg.init_std;
    meta["invented_defaults"] = invented;
    open_out(dir / "run_meta.json") << meta.dump(1) << '\n';
}

void print_config_errors(const std::vector<std::string>& errs, std::ostream& err) {
    err << "invalid configuration:\n";
    for (const auto& e : errs) {
        err << "  " << e << '\n';
    }
}

} // namespace

int train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Experiment exp = build_experiment(cfg);
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_run_meta(cfg, exp, dir);
    open_out(dir / "config.resolved") << serialize_config(cfg);

    TrainConfig tc = cfg.train_config();
    tc.collect_inner_traces = cfg.trace_inner;
    RunWriter writer(cfg, exp, dir);
    MetaState state;
    try {
        state = run_training(exp.dist, exp.arch, tc, &writer);
    } catch (const TrainingError& e) {
        err << "training failed: " << e.what() << '\n';
        return 3;
    }
    if (cfg.iters == 0) {
        io::write_checkpoint((dir / "checkpoint_0.json").string(), {exp.arch, state.w, 0});
    }
    out << "trained " << state.iteration << " iterations; outputs in " << dir.string() << '\n';
    return 0;
}

int evaluate(const RunConfig& cfg, const std::string& checkpoint_path, std::ostream& out,
             std::ostream& err) {
    const Experiment exp = build_experiment(cfg);
    const io::Checkpoint ckpt = io::read_checkpoint(checkpoint_path);
    if (ckpt.arch.param_dim() != exp.arch.param_dim() || ckpt.arch.kind != exp.arch.kind) {
        err << "checkpoint architecture does not match the configured policy\n";
        return 2;
    }
    const Rng root = Rng(cfg.seed).split(4);
    out << "task,adapted_return_mean,adapted_return_std,reach_fraction,greedy_return\n";
    for (std::size_t i = 0; i < exp.dist.size(); ++i) {
        Rng rng = root.split(i);
        const EvalRecord rec = evaluate_adapted(exp.dist.task(i).mdp, ckpt.arch, ckpt.values,
                                                cfg.inner, cfg.eval_rollouts, rng);
        out << exp.dist.task(i).id << ',' << rec.adapted_return_mean << ','
            << rec.adapted_return_std << ',' << rec.reach_fraction << ',' << rec.greedy_return
            << '\n';
    }
    return 0;
}

int verify_theory(const RunConfig& cfg, const std::string& metrics_path, std::ostream& out,
                  std::ostream& err) {
    const Experiment exp = build_experiment(cfg);
    double G = cfg.theory_G;
    if (G <= 0.0) {
        if (exp.arch.kind != PolicyKind::tabular_softmax) {
            err << "theory.G: G not certified for MLP; supply theory.G explicitly\n";
            return 2;
        }
        G = log_prob_grad_norm_bound(exp.arch);
    }
    double R = 0.0;
    for (const auto& t : exp.dist.tasks()) {
        R = std::max(R, t.mdp.reward_bound());
    }
    theory::SmoothnessConstants c;
    try {
        c = theory::derive_constants(G, cfg.theory_L, R, cfg.gamma, cfg.horizon, cfg.inner.lambda);
    } catch (const std::invalid_argument& e) {
        err << "inner.lambda: " << e.what() << '\n';
        return 2;
    }
    const auto series = io::read_grad_sq_series(metrics_path);
    std::vector<double> values;
    for (const auto& [t, v] : series) {
        values.push_back(v);
    }
    const double alpha = cfg.alpha_schedule == AlphaSchedule::inverse_sqrt_T ? 0.0 : cfg.alpha;
    std::vector<long long> points;
    for (long long T = 1; T <= static_cast<long long>(values.size()); T *= 2) {
        points.push_back(T);
    }
    if (!values.empty() && points.back() != static_cast<long long>(values.size())) {
        points.push_back(static_cast<long long>(values.size()));
    }
    const auto report = theory::empirical_bound_check(values, c, cfg.inner.nu, cfg.task_batch,
                                                      cfg.inner.traj_batch_size, alpha, points);
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    open_out(dir / "theory_report.json") << io::bound_report_to_json(report, c) << '\n';

    out << "G_hat = " << c.G_hat << ", L_hat = " << c.L_hat << ", kappa = " << c.kappa
        << ", L_tilde = " << c.L_tilde << ", threshold T >= " << theory::min_iterations(c) << '\n';
    out << "T,running_avg,bound,margin\n";
    for (const auto& cp : report.checkpoints) {
        out << cp.T << ',' << cp.running_avg << ','
            << (cp.below_threshold ? std::string("n/a") : io::format_double(cp.bound)) << ','
            << (cp.below_threshold ? std::string("n/a") : io::format_double(cp.margin))
            << (cp.violation ? "  WARNING" : "") << '\n';
    }
    out << report.warnings << " warning(s); " << report.note << '\n';
    return 0;
}

int gradcheck(const RunConfig& cfg, std::ostream& out) {
    const Experiment exp = build_experiment(cfg);
    const auto results = run_gradcheck_suite(exp.arch, cfg.seed);
    bool all = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " (worst " << r.worst << ", tolerance "
            << r.tolerance << ")\n";
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

MetricsSummary summarize_metrics(const std::string& metrics_path) {
    const auto rows = io::read_metrics_csv(metrics_path);
    MetricsSummary summary;
    std::map<std::string, TaskSummary> by_task;
    std::vector<std::string> order;
    for (const auto& r : rows) {
        auto [it, inserted] = by_task.try_emplace(r.task_id);
        TaskSummary& s = it->second;
        if (inserted) {
            order.push_back(r.task_id);
            s.task_id = r.task_id;
            s.initial_return = r.adapted_return_mean;
            s.final_iteration = r.iteration;
        }
        if (r.iteration >= s.final_iteration) {
            s.final_iteration = r.iteration;
            s.final_return = r.adapted_return_mean;
            s.reach_fraction = r.reach_fraction;
        }
    }
    for (const auto& id : order) {
        summary.tasks.push_back(by_task[id]);
    }

    std::map<int, double> grad_sq;
    for (const auto& r : rows) {
        if (!std::isnan(r.envelope_grad_sq_norm)) {
            grad_sq.emplace(r.iteration, r.envelope_grad_sq_norm);
        }
    }
    if (grad_sq.size() >= 2) {
        std::vector<double> x, y;
        double sum = 0.0;
        int n = 0;
        for (const auto& [t, v] : grad_sq) {
            sum += v;
            ++n;
            x.push_back(static_cast<double>(t + 1));
            y.push_back(sum / n);
        }
        bool positive = true;
        for (double v : y) {
            positive = positive && v > 0.0;
        }
        if (positive) {
            summary.has_slope = true;
            summary.diagnostic_slope = theory::loglog_slope(x, y);
        }
    }
    return summary;
}

int summarize(const std::string& metrics_path, std::ostream& out, std::ostream& err) {
    MetricsSummary s;
    try {
        s = summarize_metrics(metrics_path);
    } catch (const std::exception& e) {
        err << "summarize: " << e.what() << '\n';
        return 2;
    }
    if (s.tasks.empty()) {
        out << "no data\n";
        return 0;
    }
    out << std::left << std::setw(16) << "task" << std::setw(12) << "iteration" << std::setw(16)
        << "adapted_return" << std::setw(16) << "initial_return" << "reach_fraction\n";
    for (const auto& t : s.tasks) {
        out << std::left << std::setw(16) << t.task_id << std::setw(12) << t.final_iteration
            << std::setw(16) << t.final_return << std::setw(16) << t.initial_return
            << t.reach_fraction << '\n';
    }
    out << "diagnostic slope (log running mean ||grad V~||^2 vs log t): "
        << (s.has_slope ? io::format_double(s.diagnostic_slope) : std::string("n/a")) << '\n';
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App cli{"First-order meta-reinforcement learning with Moreau envelopes"};
    std::string config_path;
    std::string mode;
    std::uint64_t seed = 0;
    std::string out_dir;
    int iters = -1;
    int threads = 0;
    std::vector<std::string> overrides;
    std::string metrics_path;
    std::string checkpoint_path;
    cli.add_option("--config", config_path, "key = value configuration file");
    cli.add_option("--mode", mode, "train | eval | verify-theory | gradcheck | summarize");
    auto* seed_opt = cli.add_option("--seed", seed, "random seed");
    cli.add_option("--out", out_dir, "output directory");
    cli.add_option("--iters", iters, "meta-iterations T");
    cli.add_option("--threads", threads, "worker threads for per-task solves");
    cli.add_option("--set", overrides, "dotted override, e.g. inner.lambda=2.0")->take_all();
    cli.add_option("--metrics", metrics_path, "metrics or diagnostics CSV (verify-theory, summarize)");
    cli.add_option("--checkpoint", checkpoint_path, "checkpoint JSON (eval)");
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e, out, err);
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        }
        apply_overrides(cfg, overrides);
        if (!mode.empty()) {
            cfg.mode = run_mode_from_string(mode);
        }
        if (*seed_opt) {
            cfg.seed = seed;
        }
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        }
        if (iters >= 0) {
            cfg.iters = iters;
        }
        if (threads > 0) {
            cfg.threads = threads;
        }
    } catch (const ConfigError& e) {
        print_config_errors({e.what()}, err);
        return 2;
    }
    if (const auto errs = cfg.validate(); !errs.empty()) {
        print_config_errors(errs, err);
        return 2;
    }

    try {
        switch (cfg.mode) {
        case RunMode::train:
            return train(cfg, out, err);
        case RunMode::eval: {
            const std::string path = checkpoint_path.empty()
                                         ? (fs::path(cfg.out_dir) /
                                            ("checkpoint_" + std::to_string(cfg.iters) + ".json"))
                                               .string()
                                         : checkpoint_path;
            return evaluate(cfg, path, out, err);
        }
        case RunMode::verify_theory:
            return verify_theory(
                cfg,
                metrics_path.empty() ? (fs::path(cfg.out_dir) / "diagnostics.csv").string()
                                     : metrics_path,
                out, err);
        case RunMode::gradcheck:
            return gradcheck(cfg, out);
        case RunMode::summarize:
            return summarize(metrics_path.empty() ? (fs::path(cfg.out_dir) / "metrics.csv").string()
                                                  : metrics_path,
                             out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace memrl::app
