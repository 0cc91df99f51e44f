// Acceptance suite: one PASS/FAIL line per criterion; exit code 0 iff all pass.
#include "memrl/app.hpp"
#include "memrl/envs/line_world.hpp"
#include "memrl/meta.hpp"
#include "memrl/run_config.hpp"
#include "memrl/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace memrl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-12});
}

struct EvalCollector : MetricsSink {
    std::map<int, std::vector<EvalRecord>> by_iter;
    void on_eval(const EvalRecord& r) override { by_iter[r.iteration].push_back(r); }
};

// 1. navigation experiment with the default configuration
Outcome nav_reproduction() {
    int good_seeds = 0;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3, 4}) {
        RunConfig cfg;
        cfg.seed = seed;
        const Experiment exp = build_experiment(cfg);
        EvalCollector sink;
        run_training(exp.dist, exp.arch, cfg.train_config(), &sink);
        const auto& first = sink.by_iter.at(0);
        const auto& last = sink.by_iter.at(cfg.iters);
        int reached = 0;
        bool tripled = true;
        detail += " seed" + std::to_string(seed) + "[";
        for (std::size_t i = 0; i < last.size(); ++i) {
            reached += last[i].reach_fraction >= 0.8 ? 1 : 0;
            const double ratio = last[i].adapted_return_mean / first[i].adapted_return_mean;
            tripled = tripled && ratio >= 3.0;
            detail += fmt("%.1f/%.1fx ", last[i].reach_fraction, ratio);
        }
        const bool ok = reached >= 2 && tripled;
        good_seeds += ok ? 1 : 0;
        detail.back() = ']';
        detail += ok ? "ok" : "no";
    }
    return {good_seeds >= 3, std::to_string(good_seeds) + "/4 seeds;" + detail};
}

const PolicyArch kTiny = PolicyArch::tabular(2, 2);

ParamVector tiny_point(Rng& rng) {
    ParamVector p(4);
    for (int i = 0; i < 4; ++i) p[i] = rng.normal();
    return p;
}

// 2. exact gradient against central differences of the exact value
Outcome exact_gradient_oracle() {
    const TaskMdp task = envs::two_state_task(2, 0.9);
    Rng rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const ParamVector p = tiny_point(rng);
        ParamVector fd(4);
        const double h = 1e-5;
        for (int k = 0; k < 4; ++k) {
            ParamVector hi = p, lo = p;
            hi[k] += h;
            lo[k] -= h;
            fd[k] = (exact_value(task, kTiny, hi) - exact_value(task, kTiny, lo)) / (2 * h);
        }
        worst = std::max(worst, rel(exact_policy_gradient(task, kTiny, p), fd));
    }
    return {worst < 1e-7, fmt("worst relative error %.3g over 50 points (tol 1e-7)", worst)};
}

// 3. unbiasedness: enumeration identity and Monte Carlo mean
Outcome estimator_unbiasedness() {
    const TaskMdp task = envs::two_state_task(2, 0.9);
    Rng rng(7);
    const ParamVector p = tiny_point(rng);
    const ParamVector exact = exact_policy_gradient(task, kTiny, p);
    ParamVector weighted = ParamVector::Zero(4);
    enumerate_trajectories(task, kTiny, p, [&](const Trajectory& t, double q) {
        weighted += q * score_gradient(task, kTiny, p, t);
    });
    const double enum_err = (weighted - exact).cwiseAbs().maxCoeff();

    const int n = 100000;
    ParamVector sum = ParamVector::Zero(4), sq = ParamVector::Zero(4);
    Rng sampler(8);
    for (int i = 0; i < n; ++i) {
        const Trajectory t = sample_trajectory(task, kTiny, p, sampler);
        const ParamVector g = score_gradient(task, kTiny, p, t);
        sum += g;
        sq += g.cwiseProduct(g);
    }
    double worst_z = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double mean = sum[k] / n;
        const double se = std::sqrt((sq[k] / n - mean * mean) / n);
        worst_z = std::max(worst_z, std::abs(mean - exact[k]) / se);
    }
    return {enum_err <= 1e-10 && worst_z <= 3.0,
            fmt("enumeration error %.3g (tol 1e-10); worst |MC - exact| = %.2f SE (tol 3)", enum_err,
                worst_z)};
}

// 4. inner solver on the deterministic quadratic stub
Outcome proximal_oracle() {
    const double a = 1.0, b = 3.0, lambda = 2.0, beta = 0.1;
    const double rate = std::abs(1 - beta * (a + lambda));
    std::vector<double> visited;
    const GradientOracle base = quadratic_oracle(a, b);
    const GradientOracle recording = [&](const ParamVector& th, Rng& r) {
        visited.push_back(th[0]);
        return base(th, r);
    };
    InnerConfig cfg;
    cfg.lambda = lambda;
    cfg.beta = beta;
    cfg.max_steps = 200;
    cfg.stop_mode = StopMode::fixed_steps;
    Rng rng(0);
    const InnerResult res = inner_solve(recording, ParamVector::Zero(1), cfg, rng);
    visited.push_back(res.theta[0]);
    const double target = exact_envelope_solution_quadratic(a, b, ParamVector::Zero(1), lambda)[0];
    int first_within = -1;
    double worst_rate = 0.0;
    for (std::size_t k = 0; k < visited.size(); ++k) {
        const double e = std::abs(visited[k] - target);
        if (e < 1e-6) {
            first_within = static_cast<int>(k);
            break;
        }
        if (k > 0) {
            const double prev = std::abs(visited[k - 1] - target);
            worst_rate = std::max(worst_rate, std::abs(e / prev - rate) / rate);
        }
    }
    const bool ok = target == 1.0 && std::abs(res.theta[0] - 1.0) < 1e-6 && first_within >= 0 &&
                    first_within <= 200 && worst_rate <= 1e-9;
    return {ok, fmt("theta=%.12f, within 1e-6 after %.0f steps, worst rate deviation %.3g (tol 1e-9)",
                    res.theta[0], first_within, worst_rate)};
}

// 5. meta-update identities
Outcome update_identity() {
    Rng rng(55);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int B = 1 + static_cast<int>(rng.next_u64() % 6);
        const int d = 1 + static_cast<int>(rng.next_u64() % 20);
        ParamVector w(d);
        for (int k = 0; k < d; ++k) w[k] = 2 * rng.normal();
        std::vector<ParamVector> th(B, ParamVector(d));
        ParamVector sum = ParamVector::Zero(d);
        for (auto& t : th) {
            for (int k = 0; k < d; ++k) t[k] = 2 * rng.normal();
            sum += t;
        }
        const double alpha = 0.01 + 0.5 * rng.uniform(), lambda = 0.1 + 3 * rng.uniform();
        const double mix = alpha * lambda;
        const ParamVector convex = (1 - mix) * w + (mix / B) * sum;
        const ParamVector a = meta_update(w, th, alpha, lambda);
        const ParamVector g = meta_update_gradient_form(w, th, alpha, lambda);
        worst = std::max({worst, rel(a, g), rel(a, convex)});
    }
    Rng r2(56);
    ParamVector w(9);
    for (int k = 0; k < 9; ++k) w[k] = r2.normal();
    const std::vector<ParamVector> copies(3, w);
    const bool fixed_point = meta_update(w, copies, 0.1, 2.0) == w;
    std::vector<ParamVector> th(3, ParamVector(9));
    ParamVector sum = ParamVector::Zero(9);
    for (auto& t : th) {
        for (int k = 0; k < 9; ++k) t[k] = r2.normal();
        sum += t;
    }
    const bool endpoint = meta_update(w, th, 0.5, 2.0) == sum / 3.0;
    return {worst <= 1e-12 && fixed_point && endpoint,
            fmt("worst relative disagreement %.3g (tol 1e-12); fixed point exact=%.0f; "
                "alpha*lambda=1 exact=%.0f",
                worst, fixed_point, endpoint)};
}

TaskMdp random_tabular_task(Rng& rng, int S, int A, int H, double gamma) {
    TaskMdp::Spec s;
    s.state_count = S;
    s.action_count = A;
    s.initial_dist.assign(S, 1.0 / S);
    for (int i = 0; i < S * A; ++i) {
        std::vector<double> w(S);
        double tot = 0;
        for (auto& x : w) tot += (x = rng.uniform() + 1e-3);
        std::vector<Transition> row;
        for (int k = 0; k < S; ++k) row.push_back({k, w[k] / tot});
        double acc = 0;
        for (int k = 0; k + 1 < S; ++k) acc += row[k].prob;
        row.back().prob = 1.0 - acc;
        s.transitions.push_back(row);
        s.rewards.push_back(rng.uniform());
    }
    s.horizon = H;
    s.discount = gamma;
    s.reward_bound = 1.0;
    return TaskMdp(s);
}

// 6. gradient-norm bound for tabular softmax
Outcome gradient_norm_bound() {
    const double gamma = 0.9;
    const double G = log_prob_grad_norm_bound(PolicyArch::tabular(2, 2));
    const double G_hat = G * 1.0 / ((1 - gamma) * (1 - gamma));
    Rng rng(66);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int S = 2 + static_cast<int>(rng.next_u64() % 4);
        const int A = 2 + static_cast<int>(rng.next_u64() % 4);
        const int H = 1 + static_cast<int>(rng.next_u64() % 30);
        const TaskMdp task = random_tabular_task(rng, S, A, H, gamma);
        const auto arch = PolicyArch::tabular(S, A);
        ParamVector p(arch.param_dim());
        const double scale = 4 * rng.uniform();
        for (int k = 0; k < p.size(); ++k) p[k] = scale * rng.normal();
        const auto batch = sample_batch(task, arch, p, 1 + static_cast<int>(rng.next_u64() % 10), rng);
        worst = std::max(worst, batch_gradient(task, arch, p, batch).norm());
    }
    return {worst <= G_hat, fmt("max ||batch gradient|| = %.4g <= G_hat = %.4g", worst, G_hat)};
}

// 7. stationarity diagnostic on the two-task line world
struct TheorySetup {
    static constexpr double G = 1.4142135623730951; // certified tabular bound
    static constexpr double L = 0.5;
    static constexpr double R = 1.0;
    static constexpr double gamma = 0.5;
    static constexpr int H = 4;
    static constexpr double lambda = 68.0; // 2 * L_hat
    static constexpr double nu = 0.05;
    static constexpr int B = 2;
    static constexpr int D = 10;
};

Outcome theorem_diagnostic() {
    using S = TheorySetup;
    const auto c = theory::derive_constants(std::sqrt(2.0), S::L, S::R, S::gamma, S::H, S::lambda);
    const long long T = std::max<long long>(theory::min_iterations(c), 4096);

    TrainConfig cfg;
    cfg.inner.lambda = S::lambda;
    cfg.inner.beta = 0.01;
    cfg.inner.nu = S::nu;
    cfg.inner.max_steps = 50;
    cfg.inner.traj_batch_size = S::D;
    cfg.inner.stop_mode = StopMode::whichever_first;
    cfg.alpha_schedule = AlphaSchedule::inverse_sqrt_T;
    cfg.task_batch_size = S::B;
    cfg.total_iterations = static_cast<int>(T);
    cfg.eval_every = static_cast<int>(T);
    cfg.eval_rollouts = 1;
    cfg.seed = 7;
    const auto dist = envs::line_world_pair(S::H, S::gamma);
    const auto state = run_training(dist, PolicyArch::tabular(4, 2), cfg);

    std::vector<double> series;
    for (const auto& rec : state.history) series.push_back(rec.envelope_grad_sq_norm);
    // running average at T' = 1, 2, 4, ..., T
    std::vector<double> xs, ys;
    double acc = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        acc += series[t];
        const std::size_t n = t + 1;
        if ((n & (n - 1)) == 0 || n == series.size()) {
            xs.push_back(static_cast<double>(n));
            ys.push_back(acc / static_cast<double>(n));
        }
    }
    const double full_slope = theory::loglog_slope(xs, ys);
    // the decreasing regime starts once the warm-up transient peaks
    const auto peak = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    xs.erase(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(peak));
    ys.erase(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(peak));
    bool decreasing = xs.size() >= 3;
    for (std::size_t i = 1; i < ys.size(); ++i) decreasing = decreasing && ys[i] < ys[i - 1];
    const double slope = theory::loglog_slope(xs, ys);

    const theory::BoundInputs hand_in{256, 0.1, 2, 10, 1.0 / 32};
    const double hand = theory::theorem_bound(theory::derive_constants(1.0, 0.0, 1.0, 0.5, 1, 8.0), hand_in);
    const double hand_expected = 33.52;
    const double toy = theory::theorem_bound(c, {T, S::nu, S::B, S::D, 1.0 / (2.0 * std::sqrt(double(T)))});
    const double toy_expected = 109211.0 / 1700.0;
    const double hand_err = std::abs(hand - hand_expected) / hand_expected;
    const double toy_err = std::abs(toy - toy_expected) / toy_expected;
    const auto report = theory::empirical_bound_check(series, c, S::nu, S::B, S::D, 0.0,
                                                      std::vector<long long>{T});
    const bool ok = decreasing && slope <= -0.3 && hand_err <= 1e-12 && toy_err <= 1e-12 &&
                    report.warnings == 0;
    return {ok, "T=" + std::to_string(T) +
                    fmt(", slope %.3f over T' in [%.0f, T] (tol -0.3; %.3f from T'=1)", slope,
                        xs.front(), full_slope) +
                    fmt(", bound error %.2g / %.2g (tol 1e-12), %.0f bound warnings", hand_err,
                        toy_err, report.warnings) +
                    (decreasing ? "" : ", running average not decreasing")};
}

// 8. byte-identical metrics through the command-line driver
Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "memrl_acceptance_det";
    fs::remove_all(root);
    auto run = [&](const std::string& name, const std::string& threads) {
        const std::string out = (root / name).string();
        const char* argv[] = {"memrl", "--mode", "train", "--seed", "11", "--threads",
                              threads.c_str(), "--out", out.c_str()};
        std::ostringstream o, e;
        const int code = app::run(9, argv, o, e);
        std::ifstream in(root / name / "metrics.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return std::make_pair(code, ss.str());
    };
    const auto a = run("a", "1");
    const auto b = run("b", "1");
    const auto c = run("c", "4");
    fs::remove_all(root);
    const bool ok = a.first == 0 && b.first == 0 && c.first == 0 && !a.second.empty() &&
                    a.second == b.second && a.second == c.second;
    return {ok, fmt("threads 1 vs 1 identical=%.0f, threads 1 vs 4 identical=%.0f (%.0f bytes)",
                    a.second == b.second, a.second == c.second, double(a.second.size()))};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 navigation reproduction", nav_reproduction},
        {"2 exact-gradient oracle", exact_gradient_oracle},
        {"3 estimator unbiasedness", estimator_unbiasedness},
        {"4 proximal oracle", proximal_oracle},
        {"5 update-rule identity", update_identity},
        {"6 gradient-norm bound", gradient_norm_bound},
        {"7 stationarity diagnostic", theorem_diagnostic},
        {"8 determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail
                  << fmt(" [%.1fs]", secs) << std::endl;
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
