#include "memrl/io.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace memrl::io {

using nlohmann::json;

namespace {

json arch_to_json(const PolicyArch& arch) {
    json j;
    j["kind"] = to_string(arch.kind);
    j["state_count"] = arch.state_count;
    j["action_count"] = arch.action_count;
    if (arch.kind == PolicyKind::mlp_softmax) {
        j["hidden_width"] = arch.hidden_width;
        j["feature_dim"] = arch.feature_dim();
        std::vector<double> feats;
        for (Eigen::Index r = 0; r < arch.state_features.rows(); ++r) {
            for (Eigen::Index c = 0; c < arch.state_features.cols(); ++c) {
                feats.push_back(arch.state_features(r, c));
            }
        }
        j["state_features"] = feats;
    }
    return j;
}

PolicyArch arch_from_json(const json& j) {
    const PolicyKind kind = policy_kind_from_string(j.at("kind").get<std::string>());
    if (kind == PolicyKind::tabular_softmax) {
        return PolicyArch::tabular(j.at("state_count").get<int>(), j.at("action_count").get<int>());
    }
    const int rows = j.at("state_count").get<int>();
    const int cols = j.at("feature_dim").get<int>();
    const auto feats = j.at("state_features").get<std::vector<double>>();
    if (feats.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::runtime_error("checkpoint: state_features has wrong size");
    }
    Eigen::MatrixXd features(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            features(r, c) = feats[static_cast<std::size_t>(r) * cols + c];
        }
    }
    return PolicyArch::mlp(std::move(features), j.at("action_count").get<int>(),
                           j.at("hidden_width").get<int>());
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& s, const char* column, int line_no) {
    if (s.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error("metrics line " + std::to_string(line_no) + ": bad value '" + s +
                                 "' in column " + column);
    }
    return v;
}

int parse_int(const std::string& s, const char* column, int line_no) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error("metrics line " + std::to_string(line_no) + ": bad integer '" + s +
                                 "' in column " + column);
    }
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string trajectory_to_json_line(const Trajectory& traj) {
    json j;
    std::vector<int> states, actions;
    std::vector<double> rewards;
    for (const auto& s : traj.steps) {
        states.push_back(s.state);
        actions.push_back(s.action);
        rewards.push_back(s.reward);
    }
    j["states"] = states;
    j["actions"] = actions;
    j["rewards"] = rewards;
    j["terminal_state"] = traj.terminal_state;
    return j.dump();
}

Trajectory trajectory_from_json_line(const std::string& line) {
    const json j = json::parse(line);
    const auto states = j.at("states").get<std::vector<int>>();
    const auto actions = j.at("actions").get<std::vector<int>>();
    const auto rewards = j.at("rewards").get<std::vector<double>>();
    if (states.size() != actions.size() || states.size() != rewards.size()) {
        throw std::runtime_error("trajectory record: array lengths differ");
    }
    Trajectory traj;
    for (std::size_t h = 0; h < states.size(); ++h) {
        traj.steps.push_back({states[h], actions[h], rewards[h]});
    }
    traj.terminal_state = j.at("terminal_state").get<int>();
    return traj;
}

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    json j;
    j["arch"] = arch_to_json(ckpt.arch);
    j["iteration"] = ckpt.iteration;
    j["values"] = std::vector<double>(ckpt.values.data(), ckpt.values.data() + ckpt.values.size());
    return j.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
    const json j = json::parse(text);
    Checkpoint ckpt;
    ckpt.arch = arch_from_json(j.at("arch"));
    ckpt.iteration = j.value("iteration", 0);
    const auto values = j.at("values").get<std::vector<double>>();
    if (static_cast<int>(values.size()) != ckpt.arch.param_dim()) {
        throw std::runtime_error("checkpoint: value count does not match architecture");
    }
    ckpt.values = Eigen::Map<const ParamVector>(values.data(), static_cast<Eigen::Index>(values.size()));
    return ckpt;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << checkpoint_to_json(ckpt) << '\n';
}

Checkpoint read_checkpoint(const std::string& path) { return checkpoint_from_json(slurp(path)); }

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string metrics_row_to_csv(const MetricsRow& row) {
    std::ostringstream os;
    os << row.iteration << ',' << row.task_id << ',' << format_double(row.adapted_return_mean) << ','
       << format_double(row.adapted_return_std) << ',' << format_double(row.envelope_grad_sq_norm)
       << ',' << row.inner_steps << ',' << format_double(row.wall_ms) << ','
       << format_double(row.reach_fraction) << ',' << format_double(row.greedy_return);
    return os.str();
}

MetricsRow metrics_row_from_eval(const EvalRecord& rec, bool record_wall_clock) {
    MetricsRow row;
    row.iteration = rec.iteration;
    row.task_id = rec.task_id;
    row.adapted_return_mean = rec.adapted_return_mean;
    row.adapted_return_std = rec.adapted_return_std;
    row.envelope_grad_sq_norm = rec.envelope_grad_sq_norm;
    row.inner_steps = rec.inner_steps;
    row.wall_ms = record_wall_clock ? std::round(rec.wall_ms) : 0.0;
    row.reach_fraction = rec.reach_fraction;
    row.greedy_return = rec.greedy_return;
    return row;
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::vector<MetricsRow> rows;
    std::string line;
    if (!std::getline(in, line)) {
        return rows;
    }
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    for (const char* required : {"iteration", "task_id", "adapted_return_mean",
                                 "adapted_return_std", "envelope_grad_sq_norm", "inner_steps",
                                 "wall_ms"}) {
        if (!col.count(required)) {
            throw std::runtime_error(std::string("metrics: missing column ") + required);
        }
    }
    auto get = [&](const std::vector<std::string>& f, const char* name) -> std::string {
        const auto it = col.find(name);
        return it == col.end() ? std::string() : f.at(it->second);
    };
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw std::runtime_error("metrics line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(f.size()));
        }
        MetricsRow r;
        r.iteration = parse_int(get(f, "iteration"), "iteration", line_no);
        r.task_id = get(f, "task_id");
        r.adapted_return_mean = parse_double(get(f, "adapted_return_mean"), "adapted_return_mean", line_no);
        r.adapted_return_std = parse_double(get(f, "adapted_return_std"), "adapted_return_std", line_no);
        r.envelope_grad_sq_norm =
            parse_double(get(f, "envelope_grad_sq_norm"), "envelope_grad_sq_norm", line_no);
        r.inner_steps = parse_int(get(f, "inner_steps"), "inner_steps", line_no);
        r.wall_ms = parse_double(get(f, "wall_ms"), "wall_ms", line_no);
        r.reach_fraction = parse_double(get(f, "reach_fraction"), "reach_fraction", line_no);
        r.greedy_return = parse_double(get(f, "greedy_return"), "greedy_return", line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_metrics_csv(in);
}

std::vector<std::pair<int, double>> read_grad_sq_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        return {};
    }
    const auto header = split_csv_line(line);
    std::size_t it_col = header.size(), g_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "iteration") {
            it_col = i;
        } else if (header[i] == "envelope_grad_sq_norm") {
            g_col = i;
        }
    }
    if (it_col == header.size() || g_col == header.size()) {
        throw std::runtime_error(path + ": needs iteration and envelope_grad_sq_norm columns");
    }
    std::map<int, double> series;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw std::runtime_error(path + " line " + std::to_string(line_no) + ": wrong field count");
        }
        const double v = parse_double(f[g_col], "envelope_grad_sq_norm", line_no);
        if (!std::isnan(v)) {
            series.emplace(parse_int(f[it_col], "iteration", line_no), v);
        }
    }
    return {series.begin(), series.end()};
}

std::string bound_report_to_json(const theory::BoundReport& report,
                                  const theory::SmoothnessConstants& c) {
    json j;
    j["constants"] = {{"G", c.G},         {"L", c.L},         {"R", c.R},
                      {"gamma", c.gamma}, {"H", c.H},         {"lambda", c.lambda},
                      {"G_hat", c.G_hat}, {"L_hat", c.L_hat}, {"kappa", c.kappa},
                      {"L_tilde", c.L_tilde}, {"G_hat_tight", c.G_hat_tight},
                      {"L_hat_tight", c.L_hat_tight}};
    j["note"] = report.note;
    j["warnings"] = report.warnings;
    json cps = json::array();
    for (const auto& cp : report.checkpoints) {
        json e;
        e["T"] = cp.T;
        e["running_avg"] = cp.running_avg;
        if (cp.below_threshold) {
            e["bound"] = nullptr;
            e["margin"] = nullptr;
        } else {
            e["bound"] = cp.bound;
            e["margin"] = cp.margin;
        }
        e["violation"] = cp.violation;
        cps.push_back(e);
    }
    j["checkpoints"] = cps;
    return j.dump(1);
}

} // namespace memrl::io
