#include "ncasense/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ncasense/errors.hpp"
#include "ncasense/io.hpp"

namespace nca {

std::string to_string(SampleMode m) {
    switch (m) {
        case SampleMode::binary: return "binary";
        case SampleMode::fractional: return "fractional";
        case SampleMode::pressure: return "pressure";
    }
    return "binary";
}

SampleMode sample_mode_from_string(const std::string& s) {
    if (s == "binary") return SampleMode::binary;
    if (s == "fractional") return SampleMode::fractional;
    if (s == "pressure") return SampleMode::pressure;
    throw IoError("unknown sample mode '" + s + "'");
}

double polygon_area(const Polygon& p) {
    double twice = 0.0;
    const auto& v = p.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::abs(twice);
}

Vec2 polygon_centroid(const Polygon& p) {
    double twice = 0.0, cx = 0.0, cy = 0.0;
    const auto& v = p.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        const double cross = a.x * b.y - b.x * a.y;
        twice += cross;
        cx += (a.x + b.x) * cross;
        cy += (a.y + b.y) * cross;
    }
    if (std::abs(twice) < 1e-12) {
        throw GeometryError("polygon is degenerate (area ~ 0)");
    }
    return {cx / (3.0 * twice), cy / (3.0 * twice)};
}

double shape_area(const ShapeSpec& s) {
    if (const auto* poly = std::get_if<Polygon>(&s.geometry)) return polygon_area(*poly);
    const double r = std::get<Disc>(s.geometry).radius;
    return std::numbers::pi * r * r;
}

Vec2 shape_centroid(const ShapeSpec& s) {
    if (const auto* poly = std::get_if<Polygon>(&s.geometry)) return polygon_centroid(*poly);
    return {0.0, 0.0};
}

Vec2 true_center(const ShapeSpec& shape, const Placement& placement) {
    // Rotation is about the centroid, so the placed centroid is just the
    // shape centroid shifted by the translation.
    return shape_centroid(shape) + placement.translation;
}

static bool point_in_polygon(const Polygon& poly, Vec2 p) {
    // Even-odd ray casting.
    bool inside = false;
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
        if (crosses) {
            const double x_at =
                v[j].x + (p.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
            if (p.x < x_at) inside = !inside;
        }
    }
    return inside;
}

bool point_in_footprint(const ShapeSpec& shape, const Placement& placement, Vec2 p) {
    if (const auto* disc = std::get_if<Disc>(&shape.geometry)) {
        const Vec2 d = p - placement.translation;
        return d.x * d.x + d.y * d.y <= disc->radius * disc->radius;
    }
    // Undo the placement: rotate p by -rotation about the placed centroid.
    const Vec2 centroid = shape_centroid(shape);
    const Vec2 rel = p - (centroid + placement.translation);
    const double c = std::cos(-placement.rotation), s = std::sin(-placement.rotation);
    const Vec2 local{centroid.x + c * rel.x - s * rel.y, centroid.y + s * rel.x + c * rel.y};
    return point_in_polygon(std::get<Polygon>(shape.geometry), local);
}

// Axis-aligned bounds of the placed footprint, padded a hair.
static void placed_bounds(const ShapeSpec& shape, const Placement& placement, Vec2& lo,
                          Vec2& hi) {
    if (const auto* disc = std::get_if<Disc>(&shape.geometry)) {
        lo = {placement.translation.x - disc->radius, placement.translation.y - disc->radius};
        hi = {placement.translation.x + disc->radius, placement.translation.y + disc->radius};
        return;
    }
    const auto& poly = std::get<Polygon>(shape.geometry);
    const Vec2 centroid = polygon_centroid(poly);
    const double c = std::cos(placement.rotation), s = std::sin(placement.rotation);
    lo = {1e300, 1e300};
    hi = {-1e300, -1e300};
    for (const Vec2& v : poly.vertices) {
        const Vec2 rel = v - centroid;
        const Vec2 p = {centroid.x + c * rel.x - s * rel.y + placement.translation.x,
                        centroid.y + s * rel.x + c * rel.y + placement.translation.y};
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
}

RasterResult rasterize_footprint(const ShapeSpec& shape, const Placement& placement, int grid_h,
                                 int grid_w, SampleMode mode) {
    constexpr int kSub = 16;
    RasterResult result;
    result.readings = Grid2D(grid_h, grid_w);

    Vec2 lo, hi;
    placed_bounds(shape, placement, lo, hi);
    const int r0 = std::max(0, static_cast<int>(std::floor(lo.y)) - 1);
    const int r1 = std::min(grid_h, static_cast<int>(std::ceil(hi.y)) + 1);
    const int c0 = std::max(0, static_cast<int>(std::floor(lo.x)) - 1);
    const int c1 = std::min(grid_w, static_cast<int>(std::ceil(hi.x)) + 1);

    const double pressure_scale =
        mode == SampleMode::pressure ? shape.mass / shape_area(shape) : 0.0;

    double total = 0.0;
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
            int hits = 0;
            for (int j = 0; j < kSub; ++j) {
                const double py = r + (j + 0.5) / kSub;
                for (int i = 0; i < kSub; ++i) {
                    const double px = c + (i + 0.5) / kSub;
                    if (point_in_footprint(shape, placement, {px, py})) ++hits;
                }
            }
            const double f = static_cast<double>(hits) / (kSub * kSub);
            total += f;
            double reading = 0.0;
            switch (mode) {
                case SampleMode::binary: reading = f >= 0.5 ? 1.0 : 0.0; break;
                case SampleMode::fractional: reading = f; break;
                case SampleMode::pressure: reading = f * pressure_scale; break;
            }
            result.readings.at(r, c) = reading;
        }
    }
    result.empty_intersection = total == 0.0;
    return result;
}

std::vector<ShapeSpec> default_shapes() {
    std::vector<ShapeSpec> shapes;
    shapes.push_back({"square",
                      Polygon{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}},
                      4.0});
    shapes.push_back({"rectangle",
                      Polygon{{{0, 0}, {3, 0}, {3, 1.5}, {0, 1.5}}},
                      9.0});
    shapes.push_back({"disc", Disc{1.25}, 2.5});
    shapes.push_back({"triangle",
                      Polygon{{{0, 0}, {3, 0}, {0, 3}}},
                      6.75});
    // 3x3 square minus its top-right 1.5x1.5 corner
    shapes.push_back({"lshape",
                      Polygon{{{0, 0}, {3, 0}, {3, 1.5}, {1.5, 1.5}, {1.5, 3}, {0, 3}}},
                      6.75});
    return shapes;
}

std::vector<Sample> generate_dataset(const std::vector<ShapeSpec>& shapes,
                                     int positions_per_shape, int grid_h, int grid_w,
                                     SampleMode mode, std::uint64_t seed) {
    std::vector<Sample> samples;
    samples.reserve(shapes.size() * static_cast<std::size_t>(positions_per_shape));
    for (std::size_t si = 0; si < shapes.size(); ++si) {
        const ShapeSpec& shape = shapes[si];
        const Vec2 centroid = shape_centroid(shape);
        for (int j = 0; j < positions_per_shape; ++j) {
            Rng rng(mix_seed(seed, si, static_cast<std::uint64_t>(j)));
            const double rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const Vec2 target{rng.uniform(0.0, static_cast<double>(grid_w)),
                              rng.uniform(0.0, static_cast<double>(grid_h))};
            const Placement placement{target - centroid, rotation};

            Sample s;
            s.readings = rasterize_footprint(shape, placement, grid_h, grid_w, mode).readings;
            s.true_center = true_center(shape, placement);
            s.shape = shape.name;
            s.placement = placement;
            s.mode = mode;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

Sample centered_sample(const ShapeSpec& shape, int grid_h, int grid_w, SampleMode mode,
                       double rotation) {
    const Vec2 target{grid_w / 2.0, grid_h / 2.0};
    const Placement placement{target - shape_centroid(shape), rotation};
    Sample s;
    s.readings = rasterize_footprint(shape, placement, grid_h, grid_w, mode).readings;
    s.true_center = true_center(shape, placement);
    s.shape = shape.name;
    s.placement = placement;
    s.mode = mode;
    return s;
}

FaultResult inject_faults(const Grid2D& readings, double fraction, Rng& rng) {
    const std::size_t n = readings.size();
    const auto count = static_cast<std::size_t>(fraction * static_cast<double>(n));

    std::vector<std::uint32_t> cells(n);
    for (std::size_t i = 0; i < n; ++i) cells[i] = static_cast<std::uint32_t>(i);
    FaultResult result{readings, std::vector<std::uint8_t>(n, 0)};
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.uniform_int(static_cast<std::uint64_t>(n - i));
        std::swap(cells[i], cells[j]);
        result.readings.values[cells[i]] = 0.0;
        result.mask[cells[i]] = 1;
    }
    return result;
}

Grid2D inject_noise(const Grid2D& readings, double alpha, Rng& rng) {
    Grid2D out = readings;
    for (double& v : out.values) {
        const double z = rng.normal();
        if (v != 0.0 && alpha != 0.0) v += alpha * std::abs(v) * z;
    }
    return out;
}

// Solve the (d+1)x(d+1) normal equations by Gaussian elimination with
// partial pivoting; tiny systems, no library needed.
CalibrationCurve fit_calibration(const std::vector<RawForcePair>& pairs, int degree) {
    if (degree < 0 || degree > 7) {
        throw GeometryError("fit_calibration: degree must be in [0, 7], got " +
                            std::to_string(degree));
    }
    const int n = degree + 1;
    std::vector<double> distinct;
    for (const auto& p : pairs) {
        if (std::find(distinct.begin(), distinct.end(), p.raw) == distinct.end()) {
            distinct.push_back(p.raw);
        }
    }
    if (static_cast<int>(distinct.size()) < n) {
        throw GeometryError("fit_calibration: need >= " + std::to_string(n) +
                            " distinct raw values, got " + std::to_string(distinct.size()));
    }

    std::vector<double> ata(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> atb(static_cast<std::size_t>(n), 0.0);
    for (const auto& p : pairs) {
        double powers[16];
        powers[0] = 1.0;
        for (int i = 1; i < 2 * n - 1; ++i) powers[i] = powers[i - 1] * p.raw;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) ata[static_cast<std::size_t>(i) * n + j] += powers[i + j];
            atb[i] += powers[i] * p.force;
        }
    }

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(ata[static_cast<std::size_t>(r) * n + col]) >
                std::abs(ata[static_cast<std::size_t>(pivot) * n + col])) {
                pivot = r;
            }
        }
        if (std::abs(ata[static_cast<std::size_t>(pivot) * n + col]) < 1e-12) {
            throw GeometryError("fit_calibration: rank-deficient system");
        }
        if (pivot != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(ata[static_cast<std::size_t>(col) * n + j],
                          ata[static_cast<std::size_t>(pivot) * n + j]);
            }
            std::swap(atb[col], atb[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double factor = ata[static_cast<std::size_t>(r) * n + col] /
                                  ata[static_cast<std::size_t>(col) * n + col];
            for (int j = col; j < n; ++j) {
                ata[static_cast<std::size_t>(r) * n + j] -=
                    factor * ata[static_cast<std::size_t>(col) * n + j];
            }
            atb[r] -= factor * atb[col];
        }
    }

    CalibrationCurve curve;
    curve.coeffs.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double acc = atb[i];
        for (int j = i + 1; j < n; ++j) {
            acc -= ata[static_cast<std::size_t>(i) * n + j] * curve.coeffs[j];
        }
        curve.coeffs[i] = acc / ata[static_cast<std::size_t>(i) * n + i];
    }

    double sse = 0.0;
    for (const auto& p : pairs) {
        const double r = curve.eval(p.raw) - p.force;
        sse += r * r;
    }
    curve.residual_rms = std::sqrt(sse / static_cast<double>(pairs.size()));
    return curve;
}

Grid2D apply_calibration(const Grid2D& readings, const CalibrationTable& curves) {
    if (curves.rows != readings.rows || curves.cols != readings.cols ||
        curves.curves.size() != readings.size()) {
        throw ShapeError("apply_calibration: table is " + std::to_string(curves.rows) + "x" +
                         std::to_string(curves.cols) + " with " +
                         std::to_string(curves.curves.size()) + " curves, readings are " +
                         std::to_string(readings.rows) + "x" + std::to_string(readings.cols));
    }
    Grid2D out = readings;
    for (int r = 0; r < readings.rows; ++r) {
        for (int c = 0; c < readings.cols; ++c) {
            out.at(r, c) = curves.at(r, c).eval(readings.at(r, c));
        }
    }
    return out;
}

void save_calibration(const std::filesystem::path& path, const CalibrationTable& table) {
    std::ostringstream out;
    out << "row,col";
    const std::size_t degree = table.curves.empty() ? 0 : table.curves.front().coeffs.size() - 1;
    for (std::size_t i = 0; i <= degree; ++i) out << ",c" << i;
    out << "\n";
    for (int r = 0; r < table.rows; ++r) {
        for (int c = 0; c < table.cols; ++c) {
            out << r << "," << c;
            for (double coeff : table.at(r, c).coeffs) out << "," << format_double(coeff);
            out << "\n";
        }
    }
    write_text_file(path, out.str());
}

CalibrationTable load_calibration(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    CalibrationTable table;
    int max_row = -1, max_col = -1;
    std::vector<std::pair<std::pair<int, int>, CalibrationCurve>> entries;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;  // header
        const auto fields = split_csv_line(line);
        const std::string ctx = path.string() + ":" + std::to_string(lineno);
        if (fields.size() < 3) throw IoError(ctx + ": expected row,col,c0,...");
        const int r = static_cast<int>(parse_long(fields[0], ctx));
        const int c = static_cast<int>(parse_long(fields[1], ctx));
        CalibrationCurve curve;
        for (std::size_t i = 2; i < fields.size(); ++i) {
            curve.coeffs.push_back(parse_double(fields[i], ctx));
        }
        max_row = std::max(max_row, r);
        max_col = std::max(max_col, c);
        entries.push_back({{r, c}, std::move(curve)});
    }
    table.rows = max_row + 1;
    table.cols = max_col + 1;
    table.curves.assign(static_cast<std::size_t>(table.rows) * table.cols, {});
    for (auto& [rc, curve] : entries) {
        table.curves[static_cast<std::size_t>(rc.first) * table.cols + rc.second] =
            std::move(curve);
    }
    return table;
}

SensorDistortion make_sensor_distortion(int grid_h, int grid_w, std::uint64_t seed) {
    SensorDistortion d{Grid2D(grid_h, grid_w), Grid2D(grid_h, grid_w)};
    Rng rng(mix_seed(seed, 0xd15f0u));
    for (std::size_t i = 0; i < d.gain.size(); ++i) {
        d.gain.values[i] = rng.uniform(0.7, 1.3);
        d.quad.values[i] = rng.uniform(0.0, 0.05);
    }
    return d;
}

Grid2D distort_readings(const Grid2D& readings, const SensorDistortion& d) {
    Grid2D out = readings;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double f = readings.values[i];
        out.values[i] = d.gain.values[i] * f + d.quad.values[i] * f * f;
    }
    return out;
}

CalibrationTable calibrate_sensors(const SensorDistortion& d, double max_force, int levels,
                                   int degree) {
    CalibrationTable table;
    table.rows = d.gain.rows;
    table.cols = d.gain.cols;
    table.curves.reserve(d.gain.size());
    for (std::size_t i = 0; i < d.gain.size(); ++i) {
        std::vector<RawForcePair> pairs;
        pairs.reserve(static_cast<std::size_t>(levels) + 1);
        for (int l = 0; l <= levels; ++l) {
            const double f = max_force * l / levels;
            const double raw = d.gain.values[i] * f + d.quad.values[i] * f * f;
            pairs.push_back({raw, f});
        }
        table.curves.push_back(fit_calibration(pairs, degree));
    }
    return table;
}

void save_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples) {
    std::ostringstream out;
    if (!samples.empty()) {
        const int h = samples.front().readings.rows;
        const int w = samples.front().readings.cols;
        for (const auto& s : samples) {
            if (s.readings.rows != h || s.readings.cols != w) {
                throw ShapeError("save_dataset: samples have mixed grid dims");
            }
        }
        out << "grid_h,grid_w,mode,cx,cy,shape";
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) out << ",r" << r << "c" << c;
        }
        out << "\n";
        for (const auto& s : samples) {
            out << h << "," << w << "," << to_string(s.mode) << ","
                << format_double(s.true_center.x) << "," << format_double(s.true_center.y) << ","
                << s.shape;
            for (double v : s.readings.values) out << "," << format_double(v);
            out << "\n";
        }
    }
    write_text_file(path, out.str());
}

std::vector<Sample> load_dataset(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::vector<Sample> samples;
    if (text.empty()) return samples;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        const std::string ctx = path.string() + ":" + std::to_string(lineno);
        const auto fields = split_csv_line(line);
        if (fields.size() < 6) {
            throw IoError(ctx + ": expected at least 6 fields, got " +
                          std::to_string(fields.size()));
        }
        const int h = static_cast<int>(parse_long(fields[0], ctx));
        const int w = static_cast<int>(parse_long(fields[1], ctx));
        if (h <= 0 || w <= 0) throw IoError(ctx + ": non-positive grid dims");
        if (fields.size() != static_cast<std::size_t>(6 + h * w)) {
            throw IoError(ctx + ": expected " + std::to_string(6 + h * w) + " fields for a " +
                          std::to_string(h) + "x" + std::to_string(w) + " grid, got " +
                          std::to_string(fields.size()));
        }
        Sample s;
        s.mode = sample_mode_from_string(fields[2]);
        s.true_center = {parse_double(fields[3], ctx), parse_double(fields[4], ctx)};
        s.shape = fields[5];
        s.readings = Grid2D(h, w);
        for (int i = 0; i < h * w; ++i) {
            s.readings.values[static_cast<std::size_t>(i)] =
                parse_double(fields[static_cast<std::size_t>(6 + i)], ctx);
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace nca
