#include "ncasense/model.hpp"

#include <cmath>
#include <ostream>

#include "ncasense/errors.hpp"
#include "ncasense/io.hpp"

namespace nca {

std::vector<ParamBlock> NcaModel::param_blocks(const NcaGrads& grads) {
    return {
        {"perception.kernel", perception.kernel, grads.perception.kernel},
        {"perception.bias", perception.bias, grads.perception.bias},
        {"processing.kernel", processing.kernel, grads.processing.kernel},
        {"processing.bias", processing.bias, grads.processing.bias},
        {"output.kernel", output.kernel, grads.output.kernel},
        {"output.bias", output.bias, grads.output.bias},
    };
}

NcaModel make_nca_model(ChannelLayout layout, int processing_width, Rng& rng) {
    NcaModel m(layout, processing_width);
    init_conv_he(m.perception, rng);
    init_conv_he(m.processing, rng);
    // output stays exactly zero: the untrained NCA is the identity map
    return m;
}

double NcaGrads::l2_norm() const {
    double s = 0.0;
    for (const auto* g : {&perception, &processing, &output}) {
        for (double v : g->kernel) s += v * v;
        for (double v : g->bias) s += v * v;
    }
    return std::sqrt(s);
}

static void check_model_grid(const StateGrid& grid, const NcaModel& model) {
    if (grid.layout != model.layout) {
        throw ShapeError("model expects " + std::to_string(model.layout.total()) +
                         " state channels, grid has " + std::to_string(grid.layout.total()));
    }
}

Tensor3 perceive(const StateGrid& grid, const NcaModel& model) {
    check_model_grid(grid, model);
    const Tensor3& s = grid.tensor;
    const Tensor3 learned = conv2d_forward(s, model.perception);
    const Tensor3 sobel = sobel_depthwise(s);

    Tensor3 features(3 * s.channels, s.height, s.width);
    const std::size_t plane = static_cast<std::size_t>(s.height) * s.width;
    std::copy(learned.data.begin(), learned.data.end(), features.data.begin());
    std::copy(sobel.data.begin(), sobel.data.end(),
              features.data.begin() + static_cast<std::ptrdiff_t>(plane * s.channels));
    return features;
}

// Residual from the full snapshot; shared by the plain and cached paths.
static Tensor3 compute_residual(const StateGrid& grid, const NcaModel& model, StepCache* cache) {
    Tensor3 features = perceive(grid, model);
    Tensor3 pre = conv2d_forward(features, model.processing);
    Tensor3 act = relu(pre);
    Tensor3 residual = conv2d_forward(act, model.output);
    if (cache) {
        cache->state = grid.tensor;
        cache->features = std::move(features);
        cache->pre_act = std::move(pre);
        cache->act = std::move(act);
    }
    return residual;
}

static StateGrid apply_residual(const StateGrid& grid, const Tensor3& residual,
                                const std::vector<std::uint8_t>& mask) {
    StateGrid next = grid;
    const int H = grid.height(), W = grid.width();
    const int res_ch = residual.channels;  // 2 + hidden; maps onto channels 1..C-1
    for (int j = 0; j < res_ch; ++j) {
        const int ch = 1 + j;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                if (mask[static_cast<std::size_t>(y) * W + x]) {
                    next.tensor.at(ch, y, x) += residual.at(j, y, x);
                }
            }
        }
    }
    return next;
}

static std::vector<std::uint8_t> draw_mask(int h, int w, double fire_rate, Rng& rng) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(h) * w);
    for (auto& m : mask) m = rng.bernoulli(fire_rate) ? 1 : 0;
    return mask;
}

StateGrid update_step(const StateGrid& grid, const NcaModel& model, double fire_rate, Rng& rng) {
    const Tensor3 residual = compute_residual(grid, model, nullptr);
    const auto mask = draw_mask(grid.height(), grid.width(), fire_rate, rng);
    return apply_residual(grid, residual, mask);
}

StateGrid update_step_masked(const StateGrid& grid, const NcaModel& model,
                             const std::vector<std::uint8_t>& mask) {
    const Tensor3 residual = compute_residual(grid, model, nullptr);
    return apply_residual(grid, residual, mask);
}

RolloutResult rollout(const StateGrid& grid, const NcaModel& model, const RolloutConfig& cfg,
                      Rng& rng) {
    const int steps = cfg.steps_min == cfg.steps_max
                          ? cfg.steps_min
                          : rng.uniform_int(cfg.steps_min, cfg.steps_max);
    StateGrid state = grid;
    for (int t = 0; t < steps; ++t) {
        state = update_step(state, model, cfg.fire_rate, rng);
    }
    return {std::move(state), steps};
}

StateGrid update_step_cached(const StateGrid& grid, const NcaModel& model, double fire_rate,
                             Rng& rng, StepCache& cache) {
    const Tensor3 residual = compute_residual(grid, model, &cache);
    cache.mask = draw_mask(grid.height(), grid.width(), fire_rate, rng);
    return apply_residual(grid, residual, cache.mask);
}

Tensor3 update_step_backward(const Tensor3& grad_next, const StepCache& cache,
                             const NcaModel& model, NcaGrads& grads) {
    const int H = grad_next.height, W = grad_next.width;
    const int res_ch = model.output.out_ch;

    // dL/d(residual): mask-gated slice of channels 1..C-1.
    Tensor3 grad_residual(res_ch, H, W);
    for (int j = 0; j < res_ch; ++j) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                if (cache.mask[static_cast<std::size_t>(y) * W + x]) {
                    grad_residual.at(j, y, x) = grad_next.at(1 + j, y, x);
                }
            }
        }
    }

    Tensor3 grad_act = conv2d_backward_acc(grad_residual, cache.act, model.output, grads.output);
    Tensor3 grad_pre = relu_backward(grad_act, cache.pre_act);
    Tensor3 grad_features =
        conv2d_backward_acc(grad_pre, cache.features, model.processing, grads.processing);

    // Split the feature gradient: first C channels through the learned conv,
    // the remaining 2C through the fixed Sobel stack.
    const int C = cache.state.channels;
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    Tensor3 g_learned(C, H, W), g_sobel(2 * C, H, W);
    std::copy(grad_features.data.begin(),
              grad_features.data.begin() + static_cast<std::ptrdiff_t>(plane * C),
              g_learned.data.begin());
    std::copy(grad_features.data.begin() + static_cast<std::ptrdiff_t>(plane * C),
              grad_features.data.end(), g_sobel.data.begin());

    Tensor3 grad_state = grad_next;  // direct additive path
    const Tensor3 via_perception =
        conv2d_backward_acc(g_learned, cache.state, model.perception, grads.perception);
    const Tensor3 via_sobel = sobel_depthwise_backward(g_sobel, C);
    for (std::size_t i = 0; i < grad_state.data.size(); ++i) {
        grad_state.data[i] += via_perception.data[i] + via_sobel.data[i];
    }
    return grad_state;
}

RolloutTrace rollout_cached(const StateGrid& grid, const NcaModel& model,
                            const RolloutConfig& cfg, Rng& rng) {
    const int steps = cfg.steps_min == cfg.steps_max
                          ? cfg.steps_min
                          : rng.uniform_int(cfg.steps_min, cfg.steps_max);
    RolloutTrace trace;
    trace.steps_used = steps;
    trace.steps.resize(static_cast<std::size_t>(steps));
    StateGrid state = grid;
    for (int t = 0; t < steps; ++t) {
        state = update_step_cached(state, model, cfg.fire_rate, rng, trace.steps[t]);
    }
    trace.final = std::move(state);
    return trace;
}

Tensor3 rollout_backward(const Tensor3& grad_final, const RolloutTrace& trace,
                         const NcaModel& model, NcaGrads& grads) {
    Tensor3 g = grad_final;
    for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
        g = update_step_backward(g, *it, model, grads);
    }
    return g;
}

void rollout_trace_jsonl(const StateGrid& grid, const NcaModel& model, const RolloutConfig& cfg,
                         Rng& rng, std::ostream& out) {
    const int steps = cfg.steps_min == cfg.steps_max
                          ? cfg.steps_min
                          : rng.uniform_int(cfg.steps_min, cfg.steps_max);
    StateGrid state = grid;
    for (int t = 0; t <= steps; ++t) {
        const Vec2 mean = mean_estimate(state);
        out << "{\"step\":" << t << ",\"mean_estimate\":[" << format_double(mean.x) << ","
            << format_double(mean.y) << "],\"e\":[";
        bool first = true;
        for (int y = 0; y < state.height(); ++y) {
            for (int x = 0; x < state.width(); ++x) {
                const Vec2 e = state.estimate_offset(y, x);
                if (!first) out << ",";
                first = false;
                out << "[" << format_double(e.x) << "," << format_double(e.y) << "]";
            }
        }
        out << "]}\n";
        if (t < steps) state = update_step(state, model, cfg.fire_rate, rng);
    }
}

}  // namespace nca
