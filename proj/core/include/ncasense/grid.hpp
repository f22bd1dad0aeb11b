#pragma once

#include <utility>
#include <vector>

#include "ncasense/tensor.hpp"

namespace nca {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

double distance(Vec2 a, Vec2 b);

// Per-agent sensor readings, rows x cols, row-major.
struct Grid2D {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    Grid2D() = default;
    Grid2D(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return values.size(); }

    bool operator==(const Grid2D&) const = default;
};

// Fixed channel order of agent state: [V, Ex, Ey, H0..H_{k-1}].
// V is the sensor value, E the agent's center estimate stored as an offset
// from its own cell center in tile units, H the hidden channels.
struct ChannelLayout {
    int hidden = 8;

    int total() const { return 3 + hidden; }
    static constexpr int kSensor = 0;
    static constexpr int kEstimateX = 1;
    static constexpr int kEstimateY = 2;
    static constexpr int kHiddenFirst = 3;

    bool operator==(const ChannelLayout&) const = default;
};

// The NCA substrate: one state vector per agent on an H x W lattice.
// pitch is the physical distance between adjacent sensor centers; all grid
// math is in tile units, pitch only converts reported errors to mm.
struct StateGrid {
    Tensor3 tensor;
    ChannelLayout layout;
    double pitch = 1.0;

    StateGrid() = default;
    StateGrid(ChannelLayout l, int height, int width, double pitch_ = 1.0)
        : tensor(l.total(), height, width), layout(l), pitch(pitch_) {}

    int height() const { return tensor.height; }
    int width() const { return tensor.width; }
    int agents() const { return tensor.height * tensor.width; }

    double sensor(int r, int c) const { return tensor.at(ChannelLayout::kSensor, r, c); }
    Vec2 estimate_offset(int r, int c) const {
        return {tensor.at(ChannelLayout::kEstimateX, r, c),
                tensor.at(ChannelLayout::kEstimateY, r, c)};
    }
    // Cell centers sit at (col + 0.5, row + 0.5) in tile units.
    static Vec2 cell_center(int r, int c) { return {c + 0.5, r + 0.5}; }
};

// V = readings, E = 0, H = 0 ("empty state"). Throws NonFiniteError on a
// non-finite reading.
StateGrid init_grid(const Grid2D& readings, int hidden_channels, double pitch = 1.0);

// Per-agent global estimate: cell_center + E offset, row-major.
std::vector<Vec2> global_estimates(const StateGrid& grid);

// Unweighted mean of global_estimates over all agents (the consensus
// readout). Grid must be nonempty.
Vec2 mean_estimate(const StateGrid& grid);

}  // namespace nca
