#include "memrl/envs/line_world.hpp"
#include "memrl/pg_estimator.hpp"
#include "memrl/theory.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace memrl;

namespace {

const PolicyArch kArch = PolicyArch::tabular(2, 2);

ParamVector random_point(Rng& rng, double scale = 1.0) {
    ParamVector p(4);
    for (int i = 0; i < 4; ++i) p[i] = scale * rng.normal();
    return p;
}

Trajectory make_traj(std::vector<Step> steps, StateId last) {
    Trajectory t;
    t.steps = std::move(steps);
    t.terminal_state = last;
    return t;
}

// Tabular score for one step: e_a - pi on the block of state s.
ParamVector tabular_score(const ParamVector& p, int s, int a) {
    ParamVector g = ParamVector::Zero(p.size());
    const Eigen::VectorXd pi = oracle::softmax(p.segment(2 * s, 2));
    g.segment(2 * s, 2) = -pi;
    g[2 * s + a] += 1.0;
    return g;
}

} // namespace

TEST(ScoreGradient, ZeroRewardsGiveZero) {
    const TaskMdp task = envs::two_state_task();
    Rng rng(1);
    const ParamVector p = random_point(rng);
    const auto t = make_traj({{0, 1, 0.0}, {1, 0, 0.0}}, 1);
    EXPECT_EQ(score_gradient(task, kArch, p, t), ParamVector::Zero(4));
}

TEST(ScoreGradient, SingleStep) {
    const TaskMdp task = envs::two_state_task(1);
    Rng rng(2);
    const ParamVector p = random_point(rng);
    const auto t = make_traj({{1, 0, 1.0}}, 1);
    EXPECT_LT((score_gradient(task, kArch, p, t) - log_prob_grad(kArch, p, 1, 0) * 1.0).norm(),
              1e-15);
}

TEST(ScoreGradient, HandExpansionTwoStateTask) {
    const TaskMdp task = envs::two_state_task(2, 0.9);
    Rng rng(3);
    const ParamVector p = random_point(rng);
    // s0=0, a0=1 (r=0.7), s1=1, a1=1 (r=0.3)
    const auto t = make_traj({{0, 1, 0.7}, {1, 1, 0.3}}, 0);
    const ParamVector expected =
        tabular_score(p, 0, 1) * (0.7 + 0.9 * 0.3) + tabular_score(p, 1, 1) * (0.9 * 0.3);
    EXPECT_LT((score_gradient(task, kArch, p, t) - expected).norm(), 1e-14);
}

TEST(ScoreGradient, ConstantBaseline) {
    const TaskMdp task = envs::two_state_task(2, 0.9);
    const ParamVector p = ParamVector::Zero(4);
    const auto t = make_traj({{0, 0, 0.1}, {0, 1, 0.7}}, 1);
    ScoreOptions opt;
    opt.constant_baseline = 0.2;
    const ParamVector expected = tabular_score(p, 0, 0) * (0.1 + 0.9 * 0.7 - 0.2) +
                                 tabular_score(p, 0, 1) * (0.9 * 0.7 - 0.2);
    EXPECT_LT((score_gradient(task, kArch, p, t, opt) - expected).norm(), 1e-14);
}

TEST(ScoreGradient, DimensionMismatch) {
    const TaskMdp task = envs::two_state_task();
    const auto t = make_traj({{0, 0, 0.1}}, 0);
    EXPECT_THROW(score_gradient(task, kArch, ParamVector::Zero(3), t), std::invalid_argument);
}

TEST(BatchGradient, Averaging) {
    const TaskMdp task = envs::two_state_task(2, 0.9);
    Rng rng(4);
    const ParamVector p = random_point(rng);
    const std::vector<Trajectory> ts = {make_traj({{0, 1, 0.7}, {1, 1, 0.3}}, 0),
                                        make_traj({{1, 0, 1.0}, {1, 0, 1.0}}, 1),
                                        make_traj({{0, 0, 0.1}, {0, 1, 0.7}}, 1)};
    TrajectoryBatch one{{ts[0]}, p};
    EXPECT_EQ(batch_gradient(task, kArch, p, one), score_gradient(task, kArch, p, ts[0]));

    TrajectoryBatch three{ts, p};
    ParamVector mean = ParamVector::Zero(4);
    for (const auto& t : ts) mean += score_gradient(task, kArch, p, t);
    mean /= 3.0;
    EXPECT_LT((batch_gradient(task, kArch, p, three) - mean).norm(), 1e-15);
    EXPECT_NEAR(batch_value(task, three), (0.7 + 0.27 + 1.9 + 0.1 + 0.63) / 3, 1e-15);
}

TEST(BatchGradient, Cancellation) {
    // at zero logits, one step from state 0 with action 0 vs action 1 and equal reward
    const TaskMdp task = envs::two_state_task(1);
    const ParamVector p = ParamVector::Zero(4);
    TrajectoryBatch b{{make_traj({{0, 0, 0.5}}, 0), make_traj({{0, 1, 0.5}}, 1)}, p};
    EXPECT_LT(batch_gradient(task, kArch, p, b).norm(), 1e-16);
}

TEST(BatchGradient, ConcatenationLinearity) {
    const TaskMdp task = envs::two_state_task(3, 0.8);
    Rng rng(5);
    const ParamVector p = random_point(rng);
    const auto b1 = sample_batch(task, kArch, p, 8, rng);
    const auto b2 = sample_batch(task, kArch, p, 8, rng);
    TrajectoryBatch both{b1.trajectories, p};
    both.trajectories.insert(both.trajectories.end(), b2.trajectories.begin(),
                             b2.trajectories.end());
    const ParamVector lhs = batch_gradient(task, kArch, p, both);
    const ParamVector rhs =
        0.5 * (batch_gradient(task, kArch, p, b1) + batch_gradient(task, kArch, p, b2));
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BatchGradient, Errors) {
    const TaskMdp task = envs::two_state_task();
    const ParamVector p = ParamVector::Zero(4);
    EXPECT_THROW(batch_gradient(task, kArch, p, TrajectoryBatch{{}, p}), std::invalid_argument);
    Rng rng(6);
    const auto b = sample_batch(task, kArch, p, 2, rng);
    EXPECT_THROW(batch_gradient(task, kArch, ParamVector::Ones(4), b), std::invalid_argument);
}

TEST(Enumeration, ProbabilitiesSumToOne) {
    const TaskMdp task = envs::two_state_task(4, 0.9);
    Rng rng(7);
    const ParamVector p = random_point(rng);
    double total = 0.0;
    int count = 0;
    enumerate_trajectories(task, kArch, p, [&](const Trajectory& t, double q) {
        total += q;
        ++count;
        EXPECT_NEAR(std::log(q), trajectory_log_prob(task, kArch, p, t), 1e-12);
    });
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(count, 2 * 256); // 2 starts, 2 actions x 2 successors per step
}

TEST(Enumeration, BudgetExceeded) {
    const TaskMdp task = envs::two_state_task(12, 0.9);
    try {
        exact_value(task, kArch, ParamVector::Zero(4));
        FAIL();
    } catch (const std::length_error& e) {
        EXPECT_STREQ(e.what(), "task too large for exact oracle");
    }
}

TEST(ExactValue, MatchesDynamicProgramming) {
    Rng rng(8);
    for (int H : {1, 2, 5}) {
        const TaskMdp task = envs::two_state_task(H, 0.9);
        for (int i = 0; i < 10; ++i) {
            const ParamVector p = random_point(rng, 2.0);
            EXPECT_NEAR(exact_value(task, kArch, p), oracle::value_dp(task, kArch, p), 1e-13);
        }
    }
}

TEST(ExactValue, GeometricSum) {
    TaskMdp::Spec s;
    s.state_count = 1;
    s.action_count = 2;
    s.initial_dist = {1.0};
    s.transitions = {{{0, 1.0}}, {{0, 1.0}}};
    s.rewards = {0.4, 0.4};
    s.horizon = 6;
    s.discount = 0.7;
    const TaskMdp task(s);
    const auto arch = PolicyArch::tabular(1, 2);
    ParamVector p(2);
    p << 0.3, -1.2;
    EXPECT_NEAR(exact_value(task, arch, p), 0.4 * (1 - std::pow(0.7, 6)) / (1 - 0.7), 1e-14);
    EXPECT_LT(exact_policy_gradient(task, arch, p).norm(), 1e-10);

    s.rewards = {0.0, 0.0};
    EXPECT_EQ(exact_value(TaskMdp(s), arch, p), 0.0);
}

TEST(ExactValue, BanditOptimum) {
    TaskMdp::Spec s;
    s.state_count = 1;
    s.action_count = 2;
    s.initial_dist = {1.0};
    s.transitions = {{{0, 1.0}}, {{0, 1.0}}};
    s.rewards = {0.2, 0.9};
    s.horizon = 1;
    s.discount = 0.5;
    const TaskMdp task(s);
    const auto arch = PolicyArch::tabular(1, 2);
    ParamVector p(2);
    p << 0.0, 20.0;
    const double q1 = 1.0 / (1.0 + std::exp(-20.0));
    EXPECT_NEAR(exact_value(task, arch, p), 0.2 * (1 - q1) + 0.9 * q1, 1e-15);
    EXPECT_NEAR(exact_value(task, arch, p), 0.9, 1e-8);
}

TEST(ExactGradient, MatchesFiniteDifferencesOfDp) {
    Rng rng(9);
    for (int H : {2, 3}) {
        const TaskMdp task = envs::two_state_task(H, 0.9);
        for (int i = 0; i < 20; ++i) {
            const ParamVector p = random_point(rng);
            const auto fd = oracle::central_diff(
                [&](const Eigen::VectorXd& x) { return oracle::value_dp(task, kArch, x); }, p, 1e-5);
            EXPECT_LT(oracle::rel_err(exact_policy_gradient(task, kArch, p), fd), 1e-7);
        }
    }
}

TEST(ExactGradient, EqualsWeightedScoreSum) {
    const TaskMdp task = envs::two_state_task(3, 0.9);
    Rng rng(10);
    const ParamVector p = random_point(rng);
    ParamVector acc = ParamVector::Zero(4);
    enumerate_trajectories(task, kArch, p, [&](const Trajectory& t, double q) {
        acc += q * score_gradient(task, kArch, p, t);
    });
    EXPECT_LT((acc - exact_policy_gradient(task, kArch, p)).norm(), 1e-12);
}

TEST(Estimator, MonteCarloMeanWithinStandardErrors) {
    const TaskMdp task = envs::two_state_task(2, 0.9);
    Rng rng(11);
    const ParamVector p = random_point(rng);
    const ParamVector exact = exact_policy_gradient(task, kArch, p);
    const int n = 100000;
    ParamVector sum = ParamVector::Zero(4), sq = ParamVector::Zero(4);
    Rng sampler(12);
    for (int i = 0; i < n; ++i) {
        const auto t = sample_trajectory(task, kArch, p, sampler);
        const ParamVector g = score_gradient(task, kArch, p, t);
        sum += g;
        sq += g.cwiseProduct(g);
    }
    const ParamVector mean = sum / n;
    for (int i = 0; i < 4; ++i) {
        const double var = sq[i] / n - mean[i] * mean[i];
        EXPECT_LE(std::abs(mean[i] - exact[i]), 3 * std::sqrt(var / n)) << "component " << i;
    }
}

TEST(Estimator, BatchGradientNormBelowGHat) {
    const double gamma = 0.9;
    const auto c = theory::derive_constants(std::sqrt(2.0), 0.5, 1.0, gamma, 3, 1e6);
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const TaskMdp task = envs::two_state_task(3, gamma);
        const ParamVector p = random_point(rng, 3.0);
        const auto b = sample_batch(task, kArch, p, 5, rng);
        ASSERT_LE(batch_gradient(task, kArch, p, b).norm(), c.G_hat);
    }
}
