#include "memrl/envs/render.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace memrl::envs {

namespace {

constexpr int kCell = 40;
constexpr int kMargin = 20;
constexpr std::array<const char*, 6> kPalette{"#d62728", "#1f77b4", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b"};

struct Canvas {
    int half_width;
    double cx(int x) const { return kMargin + (x + half_width + 0.5) * kCell; }
    // SVG y grows downward
    double cy(int y) const { return kMargin + (half_width - y + 0.5) * kCell; }
};

std::string regular_polygon(double cx, double cy, double r_outer, double r_inner, int points) {
    std::ostringstream os;
    const int verts = r_inner > 0.0 ? 2 * points : points;
    for (int i = 0; i < verts; ++i) {
        const double r = (r_inner > 0.0 && i % 2 == 1) ? r_inner : r_outer;
        const double angle = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * i / verts;
        os << (i ? " " : "") << cx + r * std::cos(angle) << "," << cy + r * std::sin(angle);
    }
    return os.str();
}

} // namespace

std::vector<GridPos> trajectory_path(const NavTask& task, const Trajectory& traj) {
    std::vector<GridPos> path;
    path.reserve(traj.steps.size() + 1);
    for (const auto& step : traj.steps) {
        path.push_back(task.position(step.state));
    }
    path.push_back(task.position(traj.terminal_state));
    return path;
}

std::string render_nav_svg(const std::vector<NavTask>& tasks, const std::vector<RolloutPath>& rollouts,
                           int iteration) {
    const int hw = tasks.empty() ? 5 : tasks.front().half_width;
    const Canvas c{hw};
    const int side = 2 * hw + 1;
    const int size = side * kCell + 2 * kMargin;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
       << "\" viewBox=\"0 0 " << size << " " << size + 20 << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int i = 0; i <= side; ++i) {
        const int p = kMargin + i * kCell;
        os << "<line x1=\"" << kMargin << "\" y1=\"" << p << "\" x2=\"" << kMargin + side * kCell
           << "\" y2=\"" << p << "\" stroke=\"#ddd\"/>\n";
        os << "<line x1=\"" << p << "\" y1=\"" << kMargin << "\" x2=\"" << p << "\" y2=\""
           << kMargin + side * kCell << "\" stroke=\"#ddd\"/>\n";
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const GridPos d = tasks[i].destination;
        os << "<polygon points=\"" << regular_polygon(c.cx(d.x), c.cy(d.y), 15, 6, 5) << "\" fill=\""
           << kPalette[i % kPalette.size()] << "\" stroke=\"black\"/>\n";
    }
    for (const auto& r : rollouts) {
        if (r.path.empty()) {
            continue;
        }
        const char* color = kPalette[r.task_index % kPalette.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"3\" stroke-opacity=\"0.7\" points=\"";
        for (std::size_t k = 0; k < r.path.size(); ++k) {
            os << (k ? " " : "") << c.cx(r.path[k].x) << "," << c.cy(r.path[k].y);
        }
        os << "\"/>\n";
        const GridPos s = r.path.front();
        os << "<polygon points=\"" << regular_polygon(c.cx(s.x), c.cy(s.y), 10, 0, 3)
           << "\" fill=\"black\"/>\n";
        if (!r.reached) {
            const GridPos e = r.path.back();
            os << "<polygon points=\"" << regular_polygon(c.cx(e.x), c.cy(e.y), 9, 0, 5)
               << "\" fill=\"" << color << "\" stroke=\"black\"/>\n";
        }
    }
    os << "<text x=\"" << kMargin << "\" y=\"" << size + 10
       << "\" font-family=\"monospace\" font-size=\"14\">t = " << iteration << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string render_nav_text(const NavTask& task, const std::vector<GridPos>& path) {
    const int side = task.side();
    std::vector<std::string> rows(side, std::string(side, '.'));
    auto put = [&](GridPos p, char ch) {
        rows[task.half_width - p.y][p.x + task.half_width] = ch;
    };
    for (std::size_t k = 0; k < path.size(); ++k) {
        put(path[k], static_cast<char>('0' + k % 10));
    }
    if (!path.empty()) {
        put(path.back(), 'E');
        put(path.front(), 'S');
    }
    put(task.destination, '*');
    std::ostringstream os;
    for (const auto& row : rows) {
        os << row << '\n';
    }
    return os.str();
}

} // namespace memrl::envs
