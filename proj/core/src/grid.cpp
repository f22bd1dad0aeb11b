#include "ncasense/grid.hpp"

#include <cmath>

#include "ncasense/errors.hpp"

namespace nca {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

StateGrid init_grid(const Grid2D& readings, int hidden_channels, double pitch) {
    if (hidden_channels < 1) {
        throw ShapeError("init_grid: need at least one hidden channel, got " +
                         std::to_string(hidden_channels));
    }
    for (double v : readings.values) {
        if (!std::isfinite(v)) throw NonFiniteError("init_grid: non-finite sensor reading");
    }
    StateGrid grid(ChannelLayout{hidden_channels}, readings.rows, readings.cols, pitch);
    for (int r = 0; r < readings.rows; ++r) {
        for (int c = 0; c < readings.cols; ++c) {
            grid.tensor.at(ChannelLayout::kSensor, r, c) = readings.at(r, c);
        }
    }
    return grid;
}

std::vector<Vec2> global_estimates(const StateGrid& grid) {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(grid.agents()));
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) {
            out.push_back(StateGrid::cell_center(r, c) + grid.estimate_offset(r, c));
        }
    }
    return out;
}

Vec2 mean_estimate(const StateGrid& grid) {
    if (grid.agents() == 0) throw ShapeError("mean_estimate: empty grid");
    double sx = 0.0, sy = 0.0;
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) {
            const Vec2 e = StateGrid::cell_center(r, c) + grid.estimate_offset(r, c);
            sx += e.x;
            sy += e.y;
        }
    }
    const double n = static_cast<double>(grid.agents());
    return {sx / n, sy / n};
}

}  // namespace nca
