#pragma once

#include "memrl/envs/gridworld.hpp"
#include "memrl/meta.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace memrl {

enum class RunMode { train, eval, verify_theory, gradcheck, summarize };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

/**
 * Everything a CLI run needs. Serialized as `key = value` lines with dotted
 * keys; '#' starts a comment. Defaults reproduce the navigation experiment.
 */
struct RunConfig {
    RunMode mode = RunMode::train;
    std::uint64_t seed = 0;
    int iters = 120;
    int threads = 1;

    double alpha = 0.1;
    AlphaSchedule alpha_schedule = AlphaSchedule::constant;
    int task_batch = 2;
    double early_stop = 0.0;

    InnerConfig inner; // lambda 2, beta 0.02, K 8, D 10, fixed steps

    std::string env_kind = "nav"; // nav | line
    std::vector<envs::GridPos> destinations = envs::default_nav_destinations();
    int horizon = 30;
    double gamma = 0.99;
    bool absorbing = false;
    int half_width = 5;

    PolicyKind policy = PolicyKind::mlp_softmax;
    int hidden = 32;
    double init_std = 0.1;

    std::string out_dir = "runs/default";
    int eval_every = 10;
    int eval_rollouts = 10;
    int snapshot_every = 60;
    bool wall_clock = false;
    bool trace_inner = false;

    double theory_G = 0.0; // 0: use the certified tabular value
    double theory_L = 0.0;

    /// Field-level problems, each prefixed with its key. Empty when valid.
    std::vector<std::string> validate() const;

    TrainConfig train_config() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every known key, in serialization order.
const std::vector<std::string>& config_keys();

/// Throws ConfigError on unknown keys or unparsable values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string serialize_config(const RunConfig& cfg);
std::map<std::string, std::string> config_as_map(const RunConfig& cfg);

/// Applies "key=value" overrides in order.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

/// Task family and policy architecture described by a config.
struct Experiment {
    TaskDistribution dist;
    PolicyArch arch;
    std::vector<envs::NavTask> nav_tasks; // empty for non-grid environments
};

Experiment build_experiment(const RunConfig& cfg);

} // namespace memrl
