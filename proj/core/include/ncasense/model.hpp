#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ncasense/grid.hpp"
#include "ncasense/nn.hpp"
#include "ncasense/rng.hpp"

namespace nca {

// The shared per-agent update function:
//   features = [3x3 learned conv (C ch) | depthwise Sobel (2C ch)]
//   residual = output_1x1(relu(processing_1x1(features)))
// The residual touches only the estimate and hidden channels; the sensor
// channel is never written. The output layer starts at exactly zero so an
// untrained model is the identity map.
struct NcaModel {
    ChannelLayout layout;
    int processing_width = 64;
    ConvParams perception;   // 3x3, C -> C
    ConvParams processing;   // 1x1, 3C -> F
    ConvParams output;       // 1x1, F -> 2 + hidden

    NcaModel() = default;
    NcaModel(ChannelLayout l, int width)
        : layout(l), processing_width(width),
          perception(l.total(), l.total(), 3),
          processing(width, 3 * l.total(), 1),
          output(2 + l.hidden, width, 1) {}

    std::size_t param_count() const {
        return perception.param_count() + processing.param_count() + output.param_count();
    }
    std::vector<ParamBlock> param_blocks(const struct NcaGrads& grads);
};

// Perception and processing get He-initialized kernels; output stays zero.
NcaModel make_nca_model(ChannelLayout layout, int processing_width, Rng& rng);

struct NcaGrads {
    ConvGrads perception;
    ConvGrads processing;
    ConvGrads output;

    NcaGrads() = default;
    explicit NcaGrads(const NcaModel& m)
        : perception(m.perception), processing(m.processing), output(m.output) {}

    void reset() {
        perception.reset();
        processing.reset();
        output.reset();
    }
    void add_scaled(const NcaGrads& o, double s) {
        perception.add_scaled(o.perception, s);
        processing.add_scaled(o.processing, s);
        output.add_scaled(o.output, s);
    }
    double l2_norm() const;
};

struct RolloutConfig {
    int steps_min = 15;
    int steps_max = 30;
    double fire_rate = 0.5;
    std::uint64_t seed = 0;
};

// 3C-channel feature map: learned 3x3 conv output followed by the Sobel
// responses. Receptive field is exactly the Moore neighborhood.
Tensor3 perceive(const StateGrid& grid, const NcaModel& model);

// One asynchronous update: residuals for every cell are computed from the
// full time-t snapshot, then a per-cell Bernoulli(fire_rate) mask selects
// which cells commit. Unfired cells and the V channel are bit-identical to
// the input.
StateGrid update_step(const StateGrid& grid, const NcaModel& model, double fire_rate, Rng& rng);

// As update_step with an explicit fire mask (row-major, 1 = fired).
StateGrid update_step_masked(const StateGrid& grid, const NcaModel& model,
                             const std::vector<std::uint8_t>& mask);

// steps_used ~ U[steps_min, steps_max]; fresh mask each step; deterministic
// given the rng state.
struct RolloutResult {
    StateGrid final;
    int steps_used = 0;
};
RolloutResult rollout(const StateGrid& grid, const NcaModel& model, const RolloutConfig& cfg,
                      Rng& rng);

// ---- BPTT path ----------------------------------------------------------

// Everything the backward pass needs from one forward step.
struct StepCache {
    Tensor3 state;     // input state at time t
    Tensor3 features;  // perceive output
    Tensor3 pre_act;   // processing output before ReLU
    Tensor3 act;       // after ReLU
    std::vector<std::uint8_t> mask;
};

StateGrid update_step_cached(const StateGrid& grid, const NcaModel& model, double fire_rate,
                             Rng& rng, StepCache& cache);

// Given dL/d(state at t+1), accumulates parameter gradients and returns
// dL/d(state at t). The fire mask is treated as a constant.
Tensor3 update_step_backward(const Tensor3& grad_next, const StepCache& cache,
                             const NcaModel& model, NcaGrads& grads);

struct RolloutTrace {
    std::vector<StepCache> steps;
    StateGrid final;
    int steps_used = 0;
};

RolloutTrace rollout_cached(const StateGrid& grid, const NcaModel& model,
                            const RolloutConfig& cfg, Rng& rng);

// Backprop through every cached step; returns dL/d(initial state).
Tensor3 rollout_backward(const Tensor3& grad_final, const RolloutTrace& trace,
                         const NcaModel& model, NcaGrads& grads);

// JSON-lines trajectory dump: one record per step with the consensus
// estimate and the per-cell E offsets.
void rollout_trace_jsonl(const StateGrid& grid, const NcaModel& model, const RolloutConfig& cfg,
                         Rng& rng, std::ostream& out);

}  // namespace nca
