#include "memrl/run_config.hpp"

#include "memrl/envs/line_world.hpp"
#include "memrl/io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace memrl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const std::string t = trim(v);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": cannot parse '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::vector<envs::GridPos> parse_destinations(const std::string& key, const std::string& v) {
    std::vector<envs::GridPos> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        const auto comma = item.find(',');
        if (comma == std::string::npos) {
            throw ConfigError(key + ": expected 'x,y' pairs separated by ';', got '" + item + "'");
        }
        out.push_back({parse_number<int>(key, item.substr(0, comma)),
                       parse_number<int>(key, item.substr(comma + 1))});
    }
    return out;
}

std::string destinations_str(const std::vector<envs::GridPos>& ds) {
    std::string s;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        s += (i ? ";" : "") + std::to_string(ds[i].x) + "," + std::to_string(ds[i].y);
    }
    return s;
}

struct Field {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define MEMRL_NUM_FIELD(KEY, MEMBER, TYPE)                                                  \
    Field {                                                                                 \
        KEY, [](const RunConfig& c) { return io::format_double(static_cast<double>(c.MEMBER)); }, \
            [](RunConfig& c, const std::string& v) { c.MEMBER = parse_number<TYPE>(KEY, v); } \
    }

#define MEMRL_INT_FIELD(KEY, MEMBER, TYPE)                                                  \
    Field {                                                                                 \
        KEY, [](const RunConfig& c) { return std::to_string(c.MEMBER); },                   \
            [](RunConfig& c, const std::string& v) { c.MEMBER = parse_number<TYPE>(KEY, v); } \
    }

#define MEMRL_BOOL_FIELD(KEY, MEMBER)                                                       \
    Field {                                                                                 \
        KEY, [](const RunConfig& c) { return bool_str(c.MEMBER); },                         \
            [](RunConfig& c, const std::string& v) { c.MEMBER = parse_bool(KEY, v); }       \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"mode", [](const RunConfig& c) { return to_string(c.mode); },
         [](RunConfig& c, const std::string& v) { c.mode = run_mode_from_string(trim(v)); }},
        MEMRL_INT_FIELD("seed", seed, std::uint64_t),
        MEMRL_INT_FIELD("iters", iters, int),
        MEMRL_INT_FIELD("threads", threads, int),
        MEMRL_NUM_FIELD("meta.alpha", alpha, double),
        {"meta.alpha_schedule", [](const RunConfig& c) { return to_string(c.alpha_schedule); },
         [](RunConfig& c, const std::string& v) { c.alpha_schedule = alpha_schedule_from_string(trim(v)); }},
        MEMRL_INT_FIELD("meta.task_batch", task_batch, int),
        MEMRL_NUM_FIELD("meta.early_stop", early_stop, double),
        MEMRL_NUM_FIELD("inner.lambda", inner.lambda, double),
        MEMRL_NUM_FIELD("inner.beta", inner.beta, double),
        MEMRL_NUM_FIELD("inner.nu", inner.nu, double),
        MEMRL_INT_FIELD("inner.steps", inner.max_steps, int),
        MEMRL_INT_FIELD("inner.batch", inner.traj_batch_size, int),
        {"inner.stop", [](const RunConfig& c) { return to_string(c.inner.stop_mode); },
         [](RunConfig& c, const std::string& v) { c.inner.stop_mode = stop_mode_from_string(trim(v)); }},
        MEMRL_INT_FIELD("inner.step_limit", inner.grad_norm_step_limit, int),
        {"env.kind", [](const RunConfig& c) { return c.env_kind; },
         [](RunConfig& c, const std::string& v) { c.env_kind = trim(v); }},
        {"env.destinations", [](const RunConfig& c) { return destinations_str(c.destinations); },
         [](RunConfig& c, const std::string& v) { c.destinations = parse_destinations("env.destinations", v); }},
        MEMRL_INT_FIELD("env.horizon", horizon, int),
        MEMRL_NUM_FIELD("env.gamma", gamma, double),
        MEMRL_BOOL_FIELD("env.absorbing", absorbing),
        MEMRL_INT_FIELD("env.half_width", half_width, int),
        {"policy.arch", [](const RunConfig& c) { return to_string(c.policy); },
         [](RunConfig& c, const std::string& v) { c.policy = policy_kind_from_string(trim(v)); }},
        MEMRL_INT_FIELD("policy.hidden", hidden, int),
        MEMRL_NUM_FIELD("policy.init_std", init_std, double),
        {"output.dir", [](const RunConfig& c) { return c.out_dir; },
         [](RunConfig& c, const std::string& v) { c.out_dir = trim(v); }},
        MEMRL_INT_FIELD("output.eval_every", eval_every, int),
        MEMRL_INT_FIELD("output.eval_rollouts", eval_rollouts, int),
        MEMRL_INT_FIELD("output.snapshot_every", snapshot_every, int),
        MEMRL_BOOL_FIELD("output.wall_clock", wall_clock),
        MEMRL_BOOL_FIELD("output.trace_inner", trace_inner),
        MEMRL_NUM_FIELD("theory.G", theory_G, double),
        MEMRL_NUM_FIELD("theory.L", theory_L, double),
    };
    return table;
}

#undef MEMRL_NUM_FIELD
#undef MEMRL_INT_FIELD
#undef MEMRL_BOOL_FIELD

const Field& find_field(const std::string& key) {
    for (const auto& f : fields()) {
        if (f.key == key) {
            return f;
        }
    }
    throw ConfigError(key + ": unknown configuration key");
}

} // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::train:
        return "train";
    case RunMode::eval:
        return "eval";
    case RunMode::verify_theory:
        return "verify-theory";
    case RunMode::gradcheck:
        return "gradcheck";
    case RunMode::summarize:
        return "summarize";
    }
    return "unknown";
}

RunMode run_mode_from_string(const std::string& name) {
    for (RunMode m : {RunMode::train, RunMode::eval, RunMode::verify_theory, RunMode::gradcheck,
                      RunMode::summarize}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ConfigError("mode: unknown mode '" + name + "'");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) {
            k.push_back(f.key);
        }
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    try {
        find_field(key).set(cfg, value);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
    return find_field(key).get(cfg);
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    return out;
}

std::map<std::string, std::string> config_as_map(const RunConfig& cfg) {
    std::map<std::string, std::string> m;
    for (const auto& f : fields()) {
        m[f.key] = f.get(cfg);
    }
    return m;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set " + o + ": expected key=value");
        }
        set_config_value(cfg, trim(o.substr(0, eq)), o.substr(eq + 1));
    }
}

std::vector<std::string> RunConfig::validate() const {
    std::vector<std::string> errs;
    auto check = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) {
            errs.push_back(key + ": " + msg);
        }
    };
    check(iters >= 0, "iters", "must be >= 0");
    check(threads >= 1, "threads", "must be >= 1");
    check(alpha > 0.0 || alpha_schedule != AlphaSchedule::constant, "meta.alpha", "must be > 0");
    check(task_batch >= 1, "meta.task_batch", "must be >= 1");
    check(early_stop >= 0.0, "meta.early_stop", "must be >= 0");
    check(inner.lambda > 0.0, "inner.lambda", "must be > 0");
    check(inner.beta > 0.0, "inner.beta", "must be > 0");
    check(inner.nu >= 0.0, "inner.nu", "must be >= 0");
    check(inner.stop_mode == StopMode::fixed_steps || inner.nu > 0.0, "inner.nu",
          "must be > 0 when inner.stop uses the gradient norm");
    check(inner.max_steps >= 1, "inner.steps", "must be >= 1");
    check(inner.traj_batch_size >= 1, "inner.batch", "must be >= 1");
    check(inner.grad_norm_step_limit >= 1, "inner.step_limit", "must be >= 1");
    check(env_kind == "nav" || env_kind == "line", "env.kind", "must be 'nav' or 'line'");
    check(horizon >= 1, "env.horizon", "must be >= 1");
    check(gamma > 0.0 && gamma < 1.0, "env.gamma", "must lie in (0, 1)");
    check(half_width >= 1, "env.half_width", "must be >= 1");
    if (env_kind == "nav") {
        check(!destinations.empty(), "env.destinations", "at least one destination required");
        for (const auto& d : destinations) {
            check(std::abs(d.x) <= half_width && std::abs(d.y) <= half_width, "env.destinations",
                  "(" + std::to_string(d.x) + "," + std::to_string(d.y) + ") lies outside the grid");
        }
    }
    check(hidden >= 1, "policy.hidden", "must be >= 1");
    check(init_std >= 0.0, "policy.init_std", "must be >= 0");
    check(eval_every >= 1, "output.eval_every", "must be >= 1");
    check(eval_rollouts >= 1, "output.eval_rollouts", "must be >= 1");
    check(snapshot_every >= 0, "output.snapshot_every", "must be >= 0");
    check(theory_G >= 0.0, "theory.G", "must be >= 0");
    check(theory_L >= 0.0, "theory.L", "must be >= 0");
    return errs;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig t;
    t.inner = inner;
    t.alpha = alpha;
    t.alpha_schedule = alpha_schedule;
    t.task_batch_size = task_batch;
    t.total_iterations = iters;
    t.eval_every = eval_every;
    t.eval_rollouts = eval_rollouts;
    t.seed = seed;
    t.threads = threads;
    t.init_std = init_std;
    t.early_stop_threshold = early_stop;
    return t;
}

Experiment build_experiment(const RunConfig& cfg) {
    if (cfg.env_kind == "nav") {
        TaskDistribution dist =
            envs::build_nav_distribution(cfg.destinations, cfg.horizon, cfg.gamma, cfg.absorbing,
                                         cfg.half_width);
        std::vector<envs::NavTask> navs;
        for (const auto& d : cfg.destinations) {
            navs.push_back({cfg.half_width, d, cfg.horizon, cfg.gamma, cfg.absorbing});
        }
        PolicyArch arch = cfg.policy == PolicyKind::mlp_softmax
                              ? PolicyArch::mlp(envs::nav_state_features(navs.front()), 5, cfg.hidden)
                              : PolicyArch::tabular(navs.front().state_count(), 5);
        return {std::move(dist), std::move(arch), std::move(navs)};
    }
    if (cfg.env_kind == "line") {
        TaskDistribution dist = envs::line_world_pair(cfg.horizon, cfg.gamma);
        const int n = dist.task(0).mdp.state_count();
        PolicyArch arch;
        if (cfg.policy == PolicyKind::mlp_softmax) {
            Eigen::MatrixXd features(n, 1);
            for (int s = 0; s < n; ++s) {
                features(s, 0) = 2.0 * s / (n - 1) - 1.0;
            }
            arch = PolicyArch::mlp(std::move(features), 2, cfg.hidden);
        } else {
            arch = PolicyArch::tabular(n, 2);
        }
        return {std::move(dist), std::move(arch), {}};
    }
    throw ConfigError("env.kind: unknown environment '" + cfg.env_kind + "'");
}

} // namespace memrl
