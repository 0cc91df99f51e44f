#pragma once

#include "memrl/meta.hpp"
#include "memrl/theory.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace memrl::io {

/// One trajectory as a single-line JSON object {states, actions, rewards, terminal_state}.
std::string trajectory_to_json_line(const Trajectory& traj);
Trajectory trajectory_from_json_line(const std::string& line);

struct Checkpoint {
    PolicyArch arch;
    ParamVector values;
    int iteration = 0;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);
void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

/// Shortest round-trip decimal representation; empty string for NaN.
std::string format_double(double v);

struct MetricsRow {
    int iteration = 0;
    std::string task_id;
    double adapted_return_mean = 0.0;
    double adapted_return_std = 0.0;
    double envelope_grad_sq_norm = 0.0; // NaN when absent
    int inner_steps = 0;
    double wall_ms = 0.0;
    double reach_fraction = 0.0;
    double greedy_return = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "iteration,task_id,adapted_return_mean,adapted_return_std,envelope_grad_sq_norm,inner_steps,"
    "wall_ms,reach_fraction,greedy_return";

inline constexpr const char* kDiagnosticsHeader = "iteration,envelope_grad_sq_norm,running_avg";

std::string metrics_row_to_csv(const MetricsRow& row);
MetricsRow metrics_row_from_eval(const EvalRecord& rec, bool record_wall_clock);

/// Parses a metrics CSV. Throws std::runtime_error on malformed input.
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

/// (iteration, ||grad V~||^2) pairs from either metrics.csv or diagnostics.csv,
/// one value per iteration, sorted by iteration.
std::vector<std::pair<int, double>> read_grad_sq_series(const std::string& path);

std::string bound_report_to_json(const theory::BoundReport& report,
                                 const theory::SmoothnessConstants& constants);

} // namespace memrl::io
