#pragma once

#include <span>
#include <string>
#include <vector>

namespace memrl::theory {

/**
 * Gradient/smoothness constants of the per-task value and of its Moreau
 * envelope.
 *
 *   G_hat   = G R / (1 - gamma)^2
 *   L_hat   = (H G^2 + L) R / (1 - gamma)^2
 *   kappa   = lambda / L_hat
 *   L_tilde = lambda / (kappa - 1)
 *
 * The *_tight fields replace one 1/(1 - gamma) factor with
 * min{1/(1 - gamma), H}, which is valid for finite horizons.
 */
struct SmoothnessConstants {
    double G = 0.0;
    double L = 0.0;
    double R = 0.0;
    double gamma = 0.0;
    int H = 0;
    double lambda = 0.0;

    double G_hat = 0.0;
    double L_hat = 0.0;
    double kappa = 0.0;
    double L_tilde = 0.0;

    double horizon_factor_tight = 0.0; // min{1/(1-gamma), H}
    double G_hat_tight = 0.0;
    double L_hat_tight = 0.0;
};

/// Throws std::invalid_argument on non-positive inputs or lambda <= L_hat.
SmoothnessConstants derive_constants(double G, double L, double R, double gamma, int H,
                                     double lambda);

struct BoundInputs {
    long long T = 0;
    double nu = 0.0;
    int B = 1;
    int D = 1;
    double alpha = 0.0;
};

/// The five right-hand-side terms of the stationarity bound, in order.
std::vector<double> theorem_bound_terms(const SmoothnessConstants& c, const BoundInputs& in);

/// Sum of theorem_bound_terms. Throws std::domain_error when T < 4 L_tilde^2.
double theorem_bound(const SmoothnessConstants& c, const BoundInputs& in);

/// Smallest T satisfying the iteration threshold T >= 4 L_tilde^2.
long long min_iterations(const SmoothnessConstants& c);

struct BoundCheckpoint {
    long long T = 0;
    double running_avg = 0.0;
    double bound = 0.0; // NaN below the iteration threshold
    double margin = 0.0;
    bool below_threshold = false;
    bool violation = false;
};

struct BoundReport {
    std::vector<BoundCheckpoint> checkpoints;
    int warnings = 0;
    std::string note;
};

/**
 * Compares the running average of the observed ||grad V~(w^t)||^2 series
 * with theorem_bound at every checkpoint T (all prefix lengths when
 * `checkpoints` is empty). Violations are counted as warnings; the bound
 * governs the exact gradient, not the observed estimate.
 *
 * `alpha_for_T` of zero means alpha = 1/(2 sqrt(T)) at each checkpoint.
 */
BoundReport empirical_bound_check(std::span<const double> grad_sq_series,
                                  const SmoothnessConstants& c, double nu, int B, int D,
                                  double alpha_for_T, std::span<const long long> checkpoints = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace memrl::theory
