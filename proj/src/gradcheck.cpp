#include "memrl/gradcheck.hpp"

#include "memrl/envs/line_world.hpp"
#include "memrl/pg_estimator.hpp"

#include <algorithm>
#include <cmath>

namespace memrl {

double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor) {
    const double scale = std::max({a.norm(), b.norm(), floor});
    return (a - b).norm() / scale;
}

namespace {

Eigen::VectorXd fd_log_prob(const PolicyArch& arch, const ParamVector& p, StateId s, ActionId a,
                            double step) {
    Eigen::VectorXd g(p.size());
    ParamVector q = p;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        q[i] = p[i] + step;
        const double up = log_prob(arch, q, s, a);
        q[i] = p[i] - step;
        const double down = log_prob(arch, q, s, a);
        q[i] = p[i];
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

CheckResult check_score(const std::string& name, const PolicyArch& arch, Rng& rng, int points) {
    CheckResult r{name, true, 0.0, 1e-5};
    for (int k = 0; k < points; ++k) {
        const ParamVector p = init_params(arch, 1.0, rng);
        const auto s = static_cast<StateId>(rng.next_u64() % arch.state_count);
        const auto a = static_cast<ActionId>(rng.next_u64() % arch.action_count);
        const double err =
            relative_error(log_prob_grad(arch, p, s, a), fd_log_prob(arch, p, s, a, 1e-6));
        r.worst = std::max(r.worst, err);
    }
    r.passed = r.worst < r.tolerance;
    return r;
}

} // namespace

std::vector<CheckResult> run_gradcheck_suite(const PolicyArch& arch, std::uint64_t seed, int points) {
    std::vector<CheckResult> out;
    Rng rng(seed);
    const TaskMdp task = envs::two_state_task(2, 0.9);
    const PolicyArch tab = PolicyArch::tabular(2, 2);

    out.push_back(check_score("score gradient vs finite differences (tabular)", tab, rng, points));
    out.push_back(check_score("score gradient vs finite differences (configured " +
                                  to_string(arch.kind) + ")",
                              arch, rng, std::min(points, 20)));

    {
        CheckResult r{"score identity E_a[grad log pi] = 0 (configured)", true, 0.0, 1e-10};
        for (int k = 0; k < points; ++k) {
            const ParamVector p = init_params(arch, 1.0, rng);
            const auto s = static_cast<StateId>(rng.next_u64() % arch.state_count);
            const Eigen::VectorXd pi = action_distribution(arch, p, s);
            ParamVector acc = ParamVector::Zero(p.size());
            for (ActionId a = 0; a < arch.action_count; ++a) {
                accumulate_log_prob_grad(arch, p, s, a, pi[a], acc);
            }
            r.worst = std::max(r.worst, acc.norm());
        }
        r.passed = r.worst < r.tolerance;
        out.push_back(r);
    }
    {
        CheckResult r{"enumerated trajectory probabilities sum to 1", true, 0.0, 1e-10};
        for (int k = 0; k < points; ++k) {
            const ParamVector p = init_params(tab, 1.0, rng);
            double total = 0.0;
            enumerate_trajectories(task, tab, p, [&](const Trajectory&, double q) { total += q; });
            r.worst = std::max(r.worst, std::abs(total - 1.0));
        }
        r.passed = r.worst < r.tolerance;
        out.push_back(r);
    }
    {
        CheckResult r{"exact policy gradient vs finite differences of exact value", true, 0.0, 1e-7};
        for (int k = 0; k < points; ++k) {
            const ParamVector p = init_params(tab, 1.0, rng);
            const ParamVector g = exact_policy_gradient(task, tab, p);
            Eigen::VectorXd fd(p.size());
            ParamVector q = p;
            const double step = 1e-5;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
                q[i] = p[i] + step;
                const double up = exact_value(task, tab, q);
                q[i] = p[i] - step;
                const double down = exact_value(task, tab, q);
                q[i] = p[i];
                fd[i] = (up - down) / (2.0 * step);
            }
            r.worst = std::max(r.worst, relative_error(g, fd));
        }
        r.passed = r.worst < r.tolerance;
        out.push_back(r);
    }
    {
        CheckResult r{"tabular score norm <= sqrt(2)", true, 0.0, std::sqrt(2.0)};
        const PolicyArch wide = PolicyArch::tabular(3, 5);
        for (int k = 0; k < points * 20; ++k) {
            const ParamVector p = init_params(wide, 3.0, rng);
            const auto s = static_cast<StateId>(rng.next_u64() % 3);
            const auto a = static_cast<ActionId>(rng.next_u64() % 5);
            r.worst = std::max(r.worst, log_prob_grad(wide, p, s, a).norm());
        }
        r.passed = r.worst <= log_prob_grad_norm_bound(wide);
        out.push_back(r);
    }
    return out;
}

} // namespace memrl
