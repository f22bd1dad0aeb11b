#include "ncasense/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncasense/errors.hpp"

namespace nca {

void ConvGrads::add_scaled(const ConvGrads& o, double s) {
    for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] += s * o.kernel[i];
    for (std::size_t i = 0; i < bias.size(); ++i) bias[i] += s * o.bias[i];
}

static void check_conv_input(const Tensor3& input, const ConvParams& params) {
    if (input.channels != params.in_ch) {
        throw ShapeError("conv2d: input channels " + std::to_string(input.channels) +
                         " do not match kernel in_ch " + std::to_string(params.in_ch) +
                         " (kernel " + std::to_string(params.out_ch) + "x" +
                         std::to_string(params.in_ch) + "x" + std::to_string(params.k) + "x" +
                         std::to_string(params.k) + ", input " + input.shape_str() + ")");
    }
    if (params.k != 1 && params.k != 3) {
        throw ShapeError("conv2d: kernel size must be 1 or 3, got " + std::to_string(params.k));
    }
}

Tensor3 conv2d_forward(const Tensor3& input, const ConvParams& params) {
    check_conv_input(input, params);
    const int H = input.height, W = input.width;
    Tensor3 out(params.out_ch, H, W);

    if (params.k == 1) {
        // Pointwise: per-pixel channel mix.
        const int n = H * W;
        for (int o = 0; o < params.out_ch; ++o) {
            double* op = &out.data[static_cast<std::size_t>(o) * n];
            const double b = params.bias[o];
            for (int i = 0; i < n; ++i) op[i] = b;
            for (int c = 0; c < params.in_ch; ++c) {
                const double w = params.kernel[static_cast<std::size_t>(o) * params.in_ch + c];
                if (w == 0.0) continue;
                const double* ip = &input.data[static_cast<std::size_t>(c) * n];
                for (int i = 0; i < n; ++i) op[i] += w * ip[i];
            }
        }
        return out;
    }

    // k == 3, zero padding 1.
    for (int o = 0; o < params.out_ch; ++o) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double acc = params.bias[o];
                for (int c = 0; c < params.in_ch; ++c) {
                    const int y0 = y - 1, x0 = x - 1;
                    const int dy_lo = std::max(0, -y0), dy_hi = std::min(3, H - y0);
                    const int dx_lo = std::max(0, -x0), dx_hi = std::min(3, W - x0);
                    for (int dy = dy_lo; dy < dy_hi; ++dy) {
                        const double* irow = &input.data[input.index(c, y0 + dy, 0)];
                        const double* krow = &params.kernel[params.kindex(o, c, dy, 0)];
                        for (int dx = dx_lo; dx < dx_hi; ++dx) {
                            acc += krow[dx] * irow[x0 + dx];
                        }
                    }
                }
                out.at(o, y, x) = acc;
            }
        }
    }
    return out;
}

ConvBackwardResult conv2d_backward(const Tensor3& grad_out, const Tensor3& cached_input,
                                   const ConvParams& params) {
    ConvBackwardResult r;
    r.grad_params = ConvGrads(params);
    r.grad_input = conv2d_backward_acc(grad_out, cached_input, params, r.grad_params);
    return r;
}

Tensor3 conv2d_backward_acc(const Tensor3& grad_out, const Tensor3& cached_input,
                            const ConvParams& params, ConvGrads& acc) {
    check_conv_input(cached_input, params);
    if (grad_out.channels != params.out_ch || grad_out.height != cached_input.height ||
        grad_out.width != cached_input.width) {
        throw ShapeError("conv2d_backward: grad_out " + grad_out.shape_str() +
                         " does not match forward output " +
                         shape_str(params.out_ch, cached_input.height, cached_input.width));
    }
    const int H = cached_input.height, W = cached_input.width;
    Tensor3 grad_input(params.in_ch, H, W);

    if (params.k == 1) {
        const int n = H * W;
        for (int o = 0; o < params.out_ch; ++o) {
            const double* gp = &grad_out.data[static_cast<std::size_t>(o) * n];
            double gb = 0.0;
            for (int i = 0; i < n; ++i) gb += gp[i];
            acc.bias[o] += gb;
            for (int c = 0; c < params.in_ch; ++c) {
                const double* ip = &cached_input.data[static_cast<std::size_t>(c) * n];
                double* dip = &grad_input.data[static_cast<std::size_t>(c) * n];
                const double w = params.kernel[static_cast<std::size_t>(o) * params.in_ch + c];
                double gk = 0.0;
                for (int i = 0; i < n; ++i) {
                    gk += gp[i] * ip[i];
                    dip[i] += w * gp[i];
                }
                acc.kernel[static_cast<std::size_t>(o) * params.in_ch + c] += gk;
            }
        }
        return grad_input;
    }

    // k == 3
    for (int o = 0; o < params.out_ch; ++o) {
        for (int y = 0; y < H; ++y) {
            const double* grow = &grad_out.data[grad_out.index(o, y, 0)];
            double gb = 0.0;
            for (int x = 0; x < W; ++x) gb += grow[x];
            acc.bias[o] += gb;
        }
        for (int c = 0; c < params.in_ch; ++c) {
            for (int y = 0; y < H; ++y) {
                const double* grow = &grad_out.data[grad_out.index(o, y, 0)];
                const int y0 = y - 1;
                const int dy_lo = std::max(0, -y0), dy_hi = std::min(3, H - y0);
                for (int x = 0; x < W; ++x) {
                    const double g = grow[x];
                    if (g == 0.0) continue;
                    const int x0 = x - 1;
                    const int dx_lo = std::max(0, -x0), dx_hi = std::min(3, W - x0);
                    for (int dy = dy_lo; dy < dy_hi; ++dy) {
                        const double* irow = &cached_input.data[cached_input.index(c, y0 + dy, 0)];
                        double* dirow = &grad_input.data[grad_input.index(c, y0 + dy, 0)];
                        double* krow = &acc.kernel[params.kindex(o, c, dy, 0)];
                        const double* wrow = &params.kernel[params.kindex(o, c, dy, 0)];
                        for (int dx = dx_lo; dx < dx_hi; ++dx) {
                            krow[dx] += g * irow[x0 + dx];
                            dirow[x0 + dx] += wrow[dx] * g;
                        }
                    }
                }
            }
        }
    }
    return grad_input;
}

Tensor3 relu(const Tensor3& input) {
    Tensor3 out = input;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor3 relu_backward(const Tensor3& grad_out, const Tensor3& cached_input) {
    if (!grad_out.same_shape(cached_input)) {
        throw ShapeError("relu_backward: grad_out " + grad_out.shape_str() +
                         " does not match input " + cached_input.shape_str());
    }
    Tensor3 g = grad_out;
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        if (cached_input.data[i] <= 0.0) g.data[i] = 0.0;
    }
    return g;
}

Tensor3 sobel_depthwise(const Tensor3& input) {
    const int H = input.height, W = input.width;
    Tensor3 out(2 * input.channels, H, W);
    for (int c = 0; c < input.channels; ++c) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double gx = 0.0, gy = 0.0;
                for (int dy = 0; dy < 3; ++dy) {
                    const int yy = y + dy - 1;
                    if (yy < 0 || yy >= H) continue;
                    const double* irow = &input.data[input.index(c, yy, 0)];
                    for (int dx = 0; dx < 3; ++dx) {
                        const int xx = x + dx - 1;
                        if (xx < 0 || xx >= W) continue;
                        const double v = irow[xx];
                        gx += kSobelX[dy][dx] * v;
                        gy += kSobelX[dx][dy] * v;  // Sobel-y = transpose
                    }
                }
                out.at(2 * c, y, x) = gx;
                out.at(2 * c + 1, y, x) = gy;
            }
        }
    }
    return out;
}

Tensor3 sobel_depthwise_backward(const Tensor3& grad_out, int in_channels) {
    if (grad_out.channels != 2 * in_channels) {
        throw ShapeError("sobel_backward: grad_out has " + std::to_string(grad_out.channels) +
                         " channels, expected " + std::to_string(2 * in_channels));
    }
    const int H = grad_out.height, W = grad_out.width;
    Tensor3 grad_input(in_channels, H, W);
    for (int c = 0; c < in_channels; ++c) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const double gx = grad_out.at(2 * c, y, x);
                const double gy = grad_out.at(2 * c + 1, y, x);
                if (gx == 0.0 && gy == 0.0) continue;
                for (int dy = 0; dy < 3; ++dy) {
                    const int yy = y + dy - 1;
                    if (yy < 0 || yy >= H) continue;
                    double* drow = &grad_input.data[grad_input.index(c, yy, 0)];
                    for (int dx = 0; dx < 3; ++dx) {
                        const int xx = x + dx - 1;
                        if (xx < 0 || xx >= W) continue;
                        drow[xx] += kSobelX[dy][dx] * gx + kSobelX[dx][dy] * gy;
                    }
                }
            }
        }
    }
    return grad_input;
}

void adam_step(std::span<const ParamBlock> blocks, AdamState& state) {
    if (state.m.empty()) {
        state.m.resize(blocks.size());
        state.v.resize(blocks.size());
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            state.m[b].assign(blocks[b].value.size(), 0.0);
            state.v[b].assign(blocks[b].value.size(), 0.0);
        }
    }
    if (state.m.size() != blocks.size()) {
        throw ShapeError("adam_step: state holds " + std::to_string(state.m.size()) +
                         " blocks, got " + std::to_string(blocks.size()));
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& blk = blocks[b];
        if (blk.value.size() != blk.grad.size() || blk.value.size() != state.m[b].size()) {
            throw ShapeError("adam_step: size mismatch in block '" + blk.name + "'");
        }
        for (double g : blk.grad) {
            if (!std::isfinite(g)) {
                throw NonFiniteError("adam_step: non-finite gradient in block '" + blk.name + "'");
            }
        }
    }

    state.t += 1;
    const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        auto value = blocks[b].value;
        auto grad = blocks[b].grad;
        auto& m = state.m[b];
        auto& v = state.v[b];
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grad[i];
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            value[i] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
        }
    }
}

double grad_check(const std::function<double()>& loss_fn, std::span<double> params,
                  std::span<const double> analytic_grad, double eps, std::size_t max_coords,
                  std::uint64_t seed) {
    const std::size_t n = params.size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (max_coords != 0 && max_coords < n) {
        Rng rng(mix_seed(seed, 0x6c6fu));
        for (std::size_t i = 0; i < max_coords; ++i) {
            const std::size_t j = i + rng.uniform_int(static_cast<std::uint64_t>(n - i));
            std::swap(coords[i], coords[j]);
        }
        coords.resize(max_coords);
    }

    double worst = 0.0;
    for (std::size_t i : coords) {
        const double saved = params[i];
        params[i] = saved + eps;
        const double fp = loss_fn();
        params[i] = saved - eps;
        const double fm = loss_fn();
        params[i] = saved;
        const double numeric = (fp - fm) / (2.0 * eps);
        const double analytic = analytic_grad[i];
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    return worst;
}

void init_conv_he(ConvParams& p, Rng& rng) {
    const double stddev = std::sqrt(2.0 / (static_cast<double>(p.in_ch) * p.k * p.k));
    for (double& w : p.kernel) w = rng.normal(0.0, stddev);
    std::fill(p.bias.begin(), p.bias.end(), 0.0);
}

}  // namespace nca
