#include "ncasense/tensor.hpp"

#include <cmath>

namespace nca {

std::string shape_str(int c, int h, int w) {
    return "(" + std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w) + ")";
}

std::string Tensor3::shape_str() const { return nca::shape_str(channels, height, width); }

bool Tensor3::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace nca
