#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ncasense/rng.hpp"
#include "ncasense/tensor.hpp"

namespace nca {

// Parameters of one 2D convolution with same-padding. Kernel layout is
// (out_ch, in_ch, k, k) row-major; padding is (k-1)/2 so output spatial
// dims always equal input spatial dims. k is 1 or 3.
struct ConvParams {
    int out_ch = 0;
    int in_ch = 0;
    int k = 1;
    std::vector<double> kernel;  // out_ch * in_ch * k * k
    std::vector<double> bias;    // out_ch

    ConvParams() = default;
    ConvParams(int out_c, int in_c, int kernel_size)
        : out_ch(out_c), in_ch(in_c), k(kernel_size),
          kernel(static_cast<std::size_t>(out_c) * in_c * kernel_size * kernel_size, 0.0),
          bias(static_cast<std::size_t>(out_c), 0.0) {}

    int padding() const { return (k - 1) / 2; }
    std::size_t kindex(int o, int c, int dy, int dx) const {
        return ((static_cast<std::size_t>(o) * in_ch + c) * k + dy) * k + dx;
    }
    double& kat(int o, int c, int dy, int dx) { return kernel[kindex(o, c, dy, dx)]; }
    double kat(int o, int c, int dy, int dx) const { return kernel[kindex(o, c, dy, dx)]; }

    std::size_t param_count() const { return kernel.size() + bias.size(); }
};

// Gradients w.r.t. one convolution's parameters, same layout as ConvParams.
struct ConvGrads {
    std::vector<double> kernel;
    std::vector<double> bias;

    ConvGrads() = default;
    explicit ConvGrads(const ConvParams& p)
        : kernel(p.kernel.size(), 0.0), bias(p.bias.size(), 0.0) {}

    void reset() {
        std::fill(kernel.begin(), kernel.end(), 0.0);
        std::fill(bias.begin(), bias.end(), 0.0);
    }
    void add_scaled(const ConvGrads& o, double s);
};

// out[o,y,x] = bias[o] + sum_{c,dy,dx} kernel[o,c,dy,dx] * in_pad[c,y+dy,x+dx]
// with zero padding (k-1)/2. Throws ShapeError on channel mismatch.
Tensor3 conv2d_forward(const Tensor3& input, const ConvParams& params);

struct ConvBackwardResult {
    Tensor3 grad_input;
    ConvGrads grad_params;
};

// Exact partial derivatives w.r.t. input, kernel, and bias given the
// gradient of a scalar loss w.r.t. the forward output.
ConvBackwardResult conv2d_backward(const Tensor3& grad_out, const Tensor3& cached_input,
                                   const ConvParams& params);
// As above but accumulates parameter gradients in place and only returns
// grad_input; used on the BPTT hot path.
Tensor3 conv2d_backward_acc(const Tensor3& grad_out, const Tensor3& cached_input,
                            const ConvParams& params, ConvGrads& acc);

Tensor3 relu(const Tensor3& input);
// Gradient gated by (input > 0); the subgradient at exactly 0 is 0.
Tensor3 relu_backward(const Tensor3& grad_out, const Tensor3& cached_input);

// Depthwise Sobel: for each input channel appends the Sobel-x and Sobel-y
// responses (canonical kernels, zero padding). Output channel order is
// [x(c0), y(c0), x(c1), y(c1), ...], so 2*C channels.
Tensor3 sobel_depthwise(const Tensor3& input);
// Gradient of sobel_depthwise w.r.t. its input (fixed kernels, no params).
Tensor3 sobel_depthwise_backward(const Tensor3& grad_out, int in_channels);

// The canonical 3x3 Sobel-x kernel rows; Sobel-y is its transpose.
inline constexpr double kSobelX[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One named view onto a parameter block and its gradient.
struct ParamBlock {
    std::string name;
    std::span<double> value;
    std::span<const double> grad;
};

// Adam state for a fixed set of parameter blocks; moments are kept per
// block in registration order and must match shapes exactly.
struct AdamState {
    AdamConfig cfg;
    std::int64_t t = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    AdamState() = default;
    explicit AdamState(AdamConfig c) : cfg(c) {}
};

// Standard Adam update with bias correction; increments state.t. Throws
// NonFiniteGradient naming the offending block if any gradient entry is
// not finite.
void adam_step(std::span<const ParamBlock> blocks, AdamState& state);

// Max over sampled coordinates of
//   |analytic - central_difference| / max(|analytic|, |numeric|, 1e-8).
// loss_fn() must re-evaluate the loss with the current contents of params;
// params is perturbed in place and restored. max_coords == 0 checks all.
double grad_check(const std::function<double()>& loss_fn, std::span<double> params,
                  std::span<const double> analytic_grad, double eps = 1e-5,
                  std::size_t max_coords = 0, std::uint64_t seed = 0);

// He-style initialization for a learned conv layer; bias left at zero.
void init_conv_he(ConvParams& p, Rng& rng);

}  // namespace nca
