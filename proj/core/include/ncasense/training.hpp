#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncasense/model.hpp"
#include "ncasense/world.hpp"

namespace nca {

// Named sub-stream purposes; seeds derive as mix_seed(base, purpose, ...)
// so each consumer has an independent, stable stream.
namespace stream {
inline constexpr std::uint64_t kModelInit = 1;
inline constexpr std::uint64_t kPool = 2;
inline constexpr std::uint64_t kBatch = 3;
inline constexpr std::uint64_t kRollout = 4;
inline constexpr std::uint64_t kEval = 5;
inline constexpr std::uint64_t kSplit = 6;
inline constexpr std::uint64_t kFault = 7;
inline constexpr std::uint64_t kNoise = 8;
inline constexpr std::uint64_t kScaleData = 9;
inline constexpr std::uint64_t kCnn = 10;
}  // namespace stream

struct LossResult {
    double loss = 0.0;    // mean over agents of squared distance (optimized)
    double metric = 0.0;  // mean over agents of Euclidean distance (reported)
};

// Per-agent distance of the global estimate to the true center.
LossResult agent_loss(const StateGrid& grid, Vec2 true_center);

// d(loss)/d(state tensor); only the E channels are nonzero.
Tensor3 agent_loss_backward(const StateGrid& grid, Vec2 true_center);

// Disjoint, exhaustive, shuffled per seed; train gets ceil(n * ratio).
std::pair<std::vector<Sample>, std::vector<Sample>> split_dataset(
    const std::vector<Sample>& dataset, double ratio, std::uint64_t seed);

struct PoolEntry {
    int sample_index = 0;
    StateGrid grid;
    double last_loss = 0.0;
};

struct TrainConfig {
    int pool_size = 64;
    int batch_size = 8;
    int total_steps = 5000;
    RolloutConfig rollout;
    AdamConfig adam;
    std::uint64_t seed = 0;
    SampleMode mode = SampleMode::binary;
    double split_ratio = 0.5;
    int hidden_channels = 8;
    int processing_width = 64;
    // Global L2 gradient clip; 0 disables.
    double grad_clip_norm = 1.0;
    // Early stop when the smoothed metric has not improved by min_delta
    // for `patience` steps; 0 disables.
    int early_stop_patience = 500;
    double early_stop_min_delta = 1e-4;
    int jobs = 1;
    // Where to drop a diagnostic checkpoint if the loss goes non-finite.
    std::string diagnostic_path;
};

struct CurvePoint {
    int step = 0;
    double loss = 0.0;
    double metric = 0.0;
};

struct TrainResult {
    NcaModel model;
    std::vector<CurvePoint> curve;
};

// Pool-based training: per step draw a batch of pool entries, reset the
// worst one to its sample's empty state, roll each entry out with BPTT
// through every update step, apply one Adam step to the shared parameters,
// and persist the final grids back into the pool.
TrainResult train(const std::vector<Sample>& train_set, const TrainConfig& cfg);

struct EvalResult {
    std::vector<double> errors;  // per-sample consensus error, tile units
    double mean = 0.0;
    double stddev = 0.0;
    bool valid = false;  // false for an empty dataset
};

// Per sample: init, rollout, |mean_estimate - true_center|.
EvalResult evaluate(const NcaModel& model, const std::vector<Sample>& dataset,
                    const RolloutConfig& cfg, std::uint64_t seed, int jobs = 1);

void save_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

double mean_of(const std::vector<double>& v);
double stddev_of(const std::vector<double>& v);  // sample std, 0 for n < 2

}  // namespace nca
