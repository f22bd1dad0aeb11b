#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ncasense/baseline.hpp"
#include "ncasense/model.hpp"
#include "ncasense/training.hpp"

namespace nca {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kModelKindNca = "nca";
inline constexpr const char* kModelKindCentralized = "centralized";

// Single-file, versioned, self-describing JSON container holding either
// model kind plus the configs and training curve that produced it.
struct Checkpoint {
    int version = kCheckpointVersion;
    std::string model_kind = kModelKindNca;
    std::optional<NcaModel> nca;
    std::optional<CnnModel> cnn;
    RolloutConfig rollout;
    std::optional<TrainConfig> train_config;
    std::optional<CnnTrainConfig> cnn_train_config;
    std::vector<CurvePoint> curve;

    bool is_nca() const { return model_kind == kModelKindNca; }
};

Checkpoint make_nca_checkpoint(NcaModel model, const TrainConfig& cfg,
                               std::vector<CurvePoint> curve);
Checkpoint make_cnn_checkpoint(CnnModel model, const CnnTrainConfig& cfg,
                               std::vector<CurvePoint> curve);

// Lossless round-trip (doubles serialized shortest-round-trip). Throws
// IoError on version mismatch, truncation, or malformed content.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Run the checkpointed model on one reading grid. For the NCA kind this is
// init + rollout with the stored rollout config (seeded per call); the
// centralized kind predicts directly and requires matching dims.
Vec2 checkpoint_estimate(const Checkpoint& ckpt, const Grid2D& readings,
                         std::uint64_t rollout_seed);

}  // namespace nca
