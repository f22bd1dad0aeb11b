#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nca {

// Dense 3D tensor of doubles, (channels, height, width), row-major with the
// channel index outermost. The only tensor rank the models need.
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int c, int h, int w)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, 0.0) {}

    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor3& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }

    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height + y) * width + x;
    }
    double& at(int c, int y, int x) { return data[index(c, y, x)]; }
    double at(int c, int y, int x) const { return data[index(c, y, x)]; }

    // Zero-padded read; out-of-range spatial indices yield 0.
    double at_padded(int c, int y, int x) const {
        if (y < 0 || y >= height || x < 0 || x >= width) return 0.0;
        return data[index(c, y, x)];
    }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    std::string shape_str() const;
    bool all_finite() const;
};

// "(CxHxW)" for error messages.
std::string shape_str(int c, int h, int w);

}  // namespace nca
