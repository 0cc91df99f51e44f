#include "memrl/envs/gridworld.hpp"
#include "memrl/io.hpp"
#include "memrl/run_config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace memrl;

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(3.0), "3");
    EXPECT_EQ(io::format_double(std::nan("")), "");
    const double x = 0.1 + 0.2;
    EXPECT_EQ(std::stod(io::format_double(x)), x);
}

TEST(TrajectoryJson, RoundTrip) {
    Trajectory t;
    t.steps = {{3, 1, 0.25}, {4, 0, 1.0 / 3}};
    t.terminal_state = 9;
    const auto back = io::trajectory_from_json_line(io::trajectory_to_json_line(t));
    ASSERT_EQ(back.length(), 2);
    EXPECT_EQ(back.steps[1].state, 4);
    EXPECT_EQ(back.steps[1].reward, 1.0 / 3);
    EXPECT_EQ(back.terminal_state, 9);
    EXPECT_EQ(io::trajectory_to_json_line(t).find('\n'), std::string::npos);
}

TEST(Checkpoint, RoundTripBothArchitectures) {
    envs::NavTask nav;
    Rng rng(1);
    for (const auto& arch : {PolicyArch::tabular(4, 2), PolicyArch::mlp(envs::nav_state_features(nav), 5, 6)}) {
        const io::Checkpoint c{arch, init_params(arch, 0.7, rng), 42};
        const auto back = io::checkpoint_from_json(io::checkpoint_to_json(c));
        EXPECT_EQ(back.iteration, 42);
        EXPECT_EQ(back.values, c.values);
        EXPECT_EQ(back.arch.kind, arch.kind);
        EXPECT_EQ(back.arch.param_dim(), arch.param_dim());
        EXPECT_EQ(back.arch.state_features, arch.state_features);
    }
    EXPECT_THROW(io::checkpoint_from_json("{\"nope\": 1}"), std::exception);
}

TEST(MetricsCsv, RoundTrip) {
    io::MetricsRow r;
    r.iteration = 10;
    r.task_id = "nav_2_2";
    r.adapted_return_mean = 1.25;
    r.adapted_return_std = 0.5;
    r.envelope_grad_sq_norm = std::nan("");
    r.inner_steps = 8;
    r.reach_fraction = 0.7;
    r.greedy_return = 2.5;
    std::stringstream ss;
    ss << io::kMetricsHeader << '\n' << io::metrics_row_to_csv(r) << '\n';
    const auto rows = io::read_metrics_csv(ss);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].task_id, "nav_2_2");
    EXPECT_EQ(rows[0].adapted_return_mean, 1.25);
    EXPECT_TRUE(std::isnan(rows[0].envelope_grad_sq_norm));
    EXPECT_EQ(rows[0].reach_fraction, 0.7);
}

TEST(MetricsCsv, Malformed) {
    std::stringstream missing("iteration,task_id\n1,a\n");
    EXPECT_THROW(io::read_metrics_csv(missing), std::runtime_error);
    std::stringstream ragged(std::string(io::kMetricsHeader) + "\n1,a,2\n");
    EXPECT_THROW(io::read_metrics_csv(ragged), std::runtime_error);
    std::stringstream junk(std::string(io::kMetricsHeader) + "\nx,a,1,1,1,1,1,1,1\n");
    EXPECT_THROW(io::read_metrics_csv(junk), std::runtime_error);
    std::stringstream empty("");
    EXPECT_TRUE(io::read_metrics_csv(empty).empty());
}

TEST(MetricsCsv, WallClockOptIn) {
    EvalRecord e;
    e.wall_ms = 12.5;
    EXPECT_EQ(io::metrics_row_from_eval(e, false).wall_ms, 0.0);
    EXPECT_EQ(io::metrics_row_from_eval(e, true).wall_ms, 13.0); // whole milliseconds
}

TEST(RunConfig, DefaultsAreValid) {
    const RunConfig c;
    EXPECT_TRUE(c.validate().empty());
    EXPECT_EQ(c.inner.lambda, 2.0);
    EXPECT_EQ(c.alpha, 0.1);
    EXPECT_EQ(c.inner.beta, 0.02);
    EXPECT_EQ(c.gamma, 0.99);
    EXPECT_EQ(c.task_batch, 2);
    EXPECT_EQ(c.inner.traj_batch_size, 10);
    EXPECT_EQ(c.inner.max_steps, 8);
    EXPECT_EQ(c.destinations.size(), 3u);
}

TEST(RunConfig, ParseAndSerializeRoundTrip) {
    const std::string text = "# comment\n"
                             "seed = 9\n"
                             "inner.lambda = 3.5   # trailing\n"
                             "env.destinations = 1,2;-3,4\n"
                             "policy.arch = tabular\n"
                             "inner.stop = whichever_first\n"
                             "inner.nu = 0.25\n";
    const RunConfig c = parse_config(text);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.inner.lambda, 3.5);
    ASSERT_EQ(c.destinations.size(), 2u);
    EXPECT_EQ(c.destinations[1], (envs::GridPos{-3, 4}));
    EXPECT_EQ(c.policy, PolicyKind::tabular_softmax);
    const RunConfig back = parse_config(serialize_config(c));
    EXPECT_EQ(serialize_config(back), serialize_config(c));
    for (const auto& key : config_keys()) {
        EXPECT_EQ(get_config_value(back, key), get_config_value(c, key)) << key;
    }
}

TEST(RunConfig, Errors) {
    EXPECT_THROW(parse_config("inner.lambda 2\n"), ConfigError);
    EXPECT_THROW(parse_config("no.such.key = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("inner.lambda = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("env.destinations = 1;2\n"), ConfigError);
    RunConfig c;
    c.inner.lambda = -1;
    c.gamma = 1.5;
    const auto errs = c.validate();
    ASSERT_EQ(errs.size(), 2u);
    EXPECT_EQ(errs[0].rfind("inner.lambda:", 0), 0u);
    EXPECT_EQ(errs[1].rfind("env.gamma:", 0), 0u);
}

TEST(RunConfig, Overrides) {
    RunConfig c;
    apply_overrides(c, {"inner.beta=0.05", "env.horizon = 12"});
    EXPECT_EQ(c.inner.beta, 0.05);
    EXPECT_EQ(c.horizon, 12);
    EXPECT_THROW(apply_overrides(c, {"inner.beta"}), ConfigError);
}

TEST(BuildExperiment, Navigation) {
    const RunConfig c;
    const auto e = build_experiment(c);
    EXPECT_EQ(e.dist.size(), 3u);
    EXPECT_EQ(e.arch.kind, PolicyKind::mlp_softmax);
    EXPECT_EQ(e.arch.param_dim(), 261);
    EXPECT_EQ(e.nav_tasks.size(), 3u);
}

TEST(BuildExperiment, LineWorld) {
    RunConfig c;
    c.env_kind = "line";
    c.policy = PolicyKind::tabular_softmax;
    c.horizon = 4;
    c.gamma = 0.5;
    const auto e = build_experiment(c);
    EXPECT_EQ(e.dist.size(), 2u);
    EXPECT_EQ(e.arch.param_dim(), 8);
    EXPECT_TRUE(e.nav_tasks.empty());
}
