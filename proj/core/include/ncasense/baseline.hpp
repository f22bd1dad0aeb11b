#pragma once

#include <cstdint>
#include <vector>

#include "ncasense/grid.hpp"
#include "ncasense/nn.hpp"
#include "ncasense/training.hpp"
#include "ncasense/world.hpp"

namespace nca {

struct Dense {
    int out = 0;
    int in = 0;
    std::vector<double> weight;  // out x in, row-major
    std::vector<double> bias;

    Dense() = default;
    Dense(int out_, int in_)
        : out(out_), in(in_), weight(static_cast<std::size_t>(out_) * in_, 0.0),
          bias(static_cast<std::size_t>(out_), 0.0) {}

    std::size_t param_count() const { return weight.size() + bias.size(); }
};

struct DenseGrads {
    std::vector<double> weight;
    std::vector<double> bias;

    DenseGrads() = default;
    explicit DenseGrads(const Dense& d) : weight(d.weight.size(), 0.0), bias(d.bias.size(), 0.0) {}
    void reset() {
        std::fill(weight.begin(), weight.end(), 0.0);
        std::fill(bias.begin(), bias.end(), 0.0);
    }
};

// Centralized comparator: sees the whole sensor grid at once, outputs the
// absolute object center in tile units. Input spatial dims are fixed at
// construction; feeding any other size is an error by design (that is the
// scaling limitation the comparison demonstrates).
struct CnnModel {
    int input_h = 0;
    int input_w = 0;
    ConvParams conv1;  // 3x3, 1 -> 16
    ConvParams conv2;  // 3x3, 16 -> 32
    Dense fc1;         // 32*H*W -> 128
    Dense fc2;         // 128 -> 64
    Dense fc3;         // 64 -> 2

    CnnModel() = default;
    CnnModel(int h, int w)
        : input_h(h), input_w(w), conv1(16, 1, 3), conv2(32, 16, 3),
          fc1(128, 32 * h * w), fc2(64, 128), fc3(2, 64) {}

    std::size_t param_count() const {
        return conv1.param_count() + conv2.param_count() + fc1.param_count() +
               fc2.param_count() + fc3.param_count();
    }
    std::vector<ParamBlock> param_blocks(const struct CnnGrads& grads);
};

struct CnnGrads {
    ConvGrads conv1, conv2;
    DenseGrads fc1, fc2, fc3;

    CnnGrads() = default;
    explicit CnnGrads(const CnnModel& m)
        : conv1(m.conv1), conv2(m.conv2), fc1(m.fc1), fc2(m.fc2), fc3(m.fc3) {}
    void reset();
    void add_scaled(const CnnGrads& o, double s);
    double l2_norm() const;
};

CnnModel make_cnn_model(int h, int w, Rng& rng);

// conv1 -> ReLU -> conv2 -> ReLU -> flatten -> fc1 -> ReLU -> fc2 -> ReLU -> fc3.
// Throws ShapeError naming the trained-for dims on any other input size.
Vec2 cnn_forward(const Grid2D& readings, const CnnModel& model);

struct CnnCache {
    Tensor3 input, pre1, act1, pre2, act2;
    std::vector<double> flat, fc1_pre, fc1_act, fc2_pre, fc2_act;
    Vec2 out;
};

Vec2 cnn_forward_cached(const Grid2D& readings, const CnnModel& model, CnnCache& cache);

// Accumulates parameter gradients for d(loss)/d(output) = grad_out.
void cnn_backward(Vec2 grad_out, const CnnCache& cache, const CnnModel& model, CnnGrads& grads);

struct CnnTrainConfig {
    int batch_size = 32;
    int total_steps = 3000;
    AdamConfig adam;
    std::uint64_t seed = 0;
    double grad_clip_norm = 1.0;
    int early_stop_patience = 500;
    double early_stop_min_delta = 1e-4;
    int jobs = 1;
};

struct CnnTrainResult {
    CnnModel model;
    std::vector<CurvePoint> curve;
};

// Mini-batch Adam on squared distance; no pool, no rollout.
CnnTrainResult cnn_train(const std::vector<Sample>& train_set, int grid_h, int grid_w,
                         const CnnTrainConfig& cfg);

// Per-sample Euclidean error of the direct prediction.
EvalResult cnn_evaluate(const CnnModel& model, const std::vector<Sample>& dataset, int jobs = 1);

}  // namespace nca
