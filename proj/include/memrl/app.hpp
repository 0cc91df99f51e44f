#pragma once

#include "memrl/run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace memrl::app {

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int evaluate(const RunConfig& cfg, const std::string& checkpoint_path, std::ostream& out,
             std::ostream& err);
int verify_theory(const RunConfig& cfg, const std::string& metrics_path, std::ostream& out,
                  std::ostream& err);
int gradcheck(const RunConfig& cfg, std::ostream& out);

struct TaskSummary {
    std::string task_id;
    int final_iteration = 0;
    double initial_return = 0.0;
    double final_return = 0.0;
    double reach_fraction = 0.0;
};

struct MetricsSummary {
    std::vector<TaskSummary> tasks;
    bool has_slope = false;
    double diagnostic_slope = 0.0;
};

/// Per-task final adapted return and reach fraction, plus the log-log slope
/// of the running mean of ||grad V~||^2 over the recorded iterations.
MetricsSummary summarize_metrics(const std::string& metrics_path);

/// Prints the summary table; "no data" for an empty file. Nonzero on malformed input.
int summarize(const std::string& metrics_path, std::ostream& out, std::ostream& err);

} // namespace memrl::app
