#include "memrl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace memrl::theory {

SmoothnessConstants derive_constants(double G, double L, double R, double gamma, int H,
                                     double lambda) {
    if (!(G > 0.0) || !(R > 0.0) || H < 1 || !(lambda > 0.0)) {
        throw std::invalid_argument("derive_constants: G, R, H and lambda must be positive");
    }
    if (!(L >= 0.0)) {
        throw std::invalid_argument("derive_constants: L must be non-negative");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("derive_constants: gamma must lie in (0, 1)");
    }
    SmoothnessConstants c;
    c.G = G;
    c.L = L;
    c.R = R;
    c.gamma = gamma;
    c.H = H;
    c.lambda = lambda;

    const double inv = 1.0 / (1.0 - gamma);
    c.G_hat = G * R * inv * inv;
    c.L_hat = (H * G * G + L) * R * inv * inv;
    if (!(lambda > c.L_hat)) {
        throw std::invalid_argument("regularization below smoothness bound");
    }
    c.kappa = lambda / c.L_hat;
    c.L_tilde = lambda / (c.kappa - 1.0);

    c.horizon_factor_tight = std::min(inv, static_cast<double>(H));
    c.G_hat_tight = G * R * inv * c.horizon_factor_tight;
    c.L_hat_tight = (H * G * G + L) * R * inv * c.horizon_factor_tight;
    return c;
}

namespace {

// 4 L_tilde^2, shaved by a relative 1e-12 so that rounding in G^2 (e.g. sqrt(2)^2)
// cannot push an integral threshold up by one
double iteration_threshold(const SmoothnessConstants& c) {
    return 4.0 * c.L_tilde * c.L_tilde * (1.0 - 1e-12);
}

} // namespace

long long min_iterations(const SmoothnessConstants& c) {
    return static_cast<long long>(std::ceil(iteration_threshold(c)));
}

std::vector<double> theorem_bound_terms(const SmoothnessConstants& c, const BoundInputs& in) {
    if (in.T < 1 || in.B < 1 || in.D < 1 || !(in.nu >= 0.0) || !(in.alpha > 0.0)) {
        throw std::invalid_argument("theorem_bound: T, B, D, alpha must be positive and nu >= 0");
    }
    if (static_cast<double>(in.T) < iteration_threshold(c)) {
        throw std::domain_error("below theorem's iteration threshold");
    }
    const double sqrt_t = std::sqrt(static_cast<double>(in.T));
    const double gap_sq = (c.lambda - c.L_hat) * (c.lambda - c.L_hat);
    const double lam_sq = c.lambda * c.lambda;
    const double nu_sq = in.nu * in.nu;
    const double g_sq = c.G_hat * c.G_hat;
    const double B = in.B;
    const double D = in.D;
    return {
        8.0 * c.R / ((1.0 - c.gamma) * sqrt_t),
        lam_sq * nu_sq / gap_sq,
        8.0 * c.L_tilde * g_sq / (B * sqrt_t),
        8.0 * c.L_tilde * lam_sq * nu_sq / (gap_sq * B * sqrt_t),
        8.0 * in.alpha * c.L_tilde * lam_sq * g_sq / (gap_sq * B * D * sqrt_t),
    };
}

double theorem_bound(const SmoothnessConstants& c, const BoundInputs& in) {
    double total = 0.0;
    for (double term : theorem_bound_terms(c, in)) {
        total += term;
    }
    return total;
}

BoundReport empirical_bound_check(std::span<const double> grad_sq_series,
                                  const SmoothnessConstants& c, double nu, int B, int D,
                                  double alpha_for_T, std::span<const long long> checkpoints) {
    BoundReport report;
    report.note = "running average uses the observed estimate ||grad V~(w^t)||^2 in place of "
                  "||grad V(w^t)||^2; violations are warnings only";
    const long long n = static_cast<long long>(grad_sq_series.size());

    std::vector<long long> points(checkpoints.begin(), checkpoints.end());
    if (points.empty()) {
        for (long long t = 1; t <= n; ++t) {
            points.push_back(t);
        }
    }
    std::vector<double> prefix(n + 1, 0.0);
    for (long long t = 0; t < n; ++t) {
        prefix[t + 1] = prefix[t] + grad_sq_series[t];
    }
    const long long threshold = min_iterations(c);
    for (long long T : points) {
        if (T < 1 || T > n) {
            continue;
        }
        BoundCheckpoint cp;
        cp.T = T;
        cp.running_avg = prefix[T] / static_cast<double>(T);
        if (T < threshold) {
            cp.below_threshold = true;
            cp.bound = std::numeric_limits<double>::quiet_NaN();
            cp.margin = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double alpha =
                alpha_for_T > 0.0 ? alpha_for_T : 1.0 / (2.0 * std::sqrt(static_cast<double>(T)));
            cp.bound = theorem_bound(c, {T, nu, B, D, alpha});
            cp.margin = cp.bound - cp.running_avg;
            cp.violation = cp.margin < -1e-12 * cp.bound;
            report.warnings += cp.violation ? 1 : 0;
        }
        report.checkpoints.push_back(cp);
    }
    return report;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need at least two paired points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("loglog_slope: values must be positive");
        }
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        throw std::invalid_argument("loglog_slope: x values are all equal");
    }
    return (n * sxy - sx * sy) / denom;
}

} // namespace memrl::theory
