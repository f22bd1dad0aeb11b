#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "ncasense/grid.hpp"
#include "ncasense/rng.hpp"

namespace nca {

struct Polygon {
    std::vector<Vec2> vertices;  // simple, non-self-intersecting, area > 0
};

struct Disc {
    double radius = 1.0;  // centered at the shape origin
};

// Object footprint in tile units; mass only matters in pressure mode.
struct ShapeSpec {
    std::string name;
    std::variant<Polygon, Disc> geometry;
    double mass = 1.0;
};

// Rigid placement: rotation about the shape centroid, then translation.
struct Placement {
    Vec2 translation;
    double rotation = 0.0;  // radians
};

enum class SampleMode { binary, fractional, pressure };
std::string to_string(SampleMode m);
SampleMode sample_mode_from_string(const std::string& s);

// One training/eval instance: what the sensors read plus the ground truth
// computed analytically from the synthetic geometry.
struct Sample {
    Grid2D readings;
    Vec2 true_center;  // tile units
    std::string shape;
    Placement placement;
    SampleMode mode = SampleMode::binary;
};

double polygon_area(const Polygon& p);
Vec2 polygon_centroid(const Polygon& p);  // throws GeometryError if area ~ 0

double shape_area(const ShapeSpec& s);
Vec2 shape_centroid(const ShapeSpec& s);

// Exact centroid of the placed footprint (full footprint, even if it hangs
// off the grid).
Vec2 true_center(const ShapeSpec& shape, const Placement& placement);

bool point_in_footprint(const ShapeSpec& shape, const Placement& placement, Vec2 p);

struct RasterResult {
    Grid2D readings;
    bool empty_intersection = false;
};

// Per-cell coverage fraction by 16x16 supersampling, then the mode map:
// binary (f >= 0.5), fractional (f), pressure (f * mass / area).
RasterResult rasterize_footprint(const ShapeSpec& shape, const Placement& placement, int grid_h,
                                 int grid_w, SampleMode mode);

// The stand-in object set: square, rectangle, disc, right triangle, L-shape.
std::vector<ShapeSpec> default_shapes();

// Uniform placements keeping the centroid within grid bounds, rotation
// uniform in [0, 2pi); per-sample seeds derived with mix_seed so generation
// parallelizes deterministically.
std::vector<Sample> generate_dataset(const std::vector<ShapeSpec>& shapes,
                                     int positions_per_shape, int grid_h, int grid_w,
                                     SampleMode mode, std::uint64_t seed);

// Convenience: one sample with the object centroid exactly at the grid
// center (used by symmetric-placement checks).
Sample centered_sample(const ShapeSpec& shape, int grid_h, int grid_w, SampleMode mode,
                       double rotation = 0.0);

struct FaultResult {
    Grid2D readings;
    std::vector<std::uint8_t> mask;  // 1 = faulted, row-major
};

// floor(fraction * N) distinct cells chosen uniformly get reading 0.
FaultResult inject_faults(const Grid2D& readings, double fraction, Rng& rng);

// Per cell: reading += Normal(0, (alpha*|reading|)^2); zero readings stay
// untouched. One draw per cell regardless of value, so streams align
// across conditions.
Grid2D inject_noise(const Grid2D& readings, double alpha, Rng& rng);

// ---- calibration --------------------------------------------------------

// Polynomial raw -> force map for one sensor cell, lowest degree first.
struct CalibrationCurve {
    std::vector<double> coeffs;
    double residual_rms = 0.0;

    double eval(double raw) const {  // Horner
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * raw + *it;
        return acc;
    }
};

struct RawForcePair {
    double raw = 0.0;
    double force = 0.0;
};

// Least-squares polynomial fit of degree d; needs >= d+1 distinct raw
// values; throws GeometryError on a rank-deficient system.
CalibrationCurve fit_calibration(const std::vector<RawForcePair>& pairs, int degree);

struct CalibrationTable {
    int rows = 0;
    int cols = 0;
    std::vector<CalibrationCurve> curves;  // row-major, one per cell

    const CalibrationCurve& at(int r, int c) const {
        return curves[static_cast<std::size_t>(r) * cols + c];
    }
};

Grid2D apply_calibration(const Grid2D& readings, const CalibrationTable& curves);

void save_calibration(const std::filesystem::path& path, const CalibrationTable& table);
CalibrationTable load_calibration(const std::filesystem::path& path);

// ---- synthetic sensor response (for the calibrated/uncalibrated study) --

// Per-cell raw = gain*f + quad*f^2: mimics inter-sensor manufacturing
// variability so "uncalibrated" data differs per cell.
struct SensorDistortion {
    Grid2D gain;
    Grid2D quad;
};

SensorDistortion make_sensor_distortion(int grid_h, int grid_w, std::uint64_t seed);
Grid2D distort_readings(const Grid2D& readings, const SensorDistortion& d);

// Simulated incremental-loading calibration: per cell, fit raw -> force
// over `levels` force steps in [0, max_force].
CalibrationTable calibrate_sensors(const SensorDistortion& d, double max_force, int levels,
                                   int degree);

// ---- dataset files ------------------------------------------------------

// CSV, header "grid_h,grid_w,mode,cx,cy,shape,r0c0,r0c1,...", readings
// row-major, one sample per line. Empty file round-trips to an empty list.
void save_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::vector<Sample> load_dataset(const std::filesystem::path& path);

}  // namespace nca
