#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ncasense/checkpoint.hpp"
#include "ncasense/stats.hpp"
#include "ncasense/world.hpp"

namespace nca {

// One sweep over a numeric condition axis; raw per-trial errors are kept
// so summaries can always be recomputed.
struct SweepResult {
    std::string axis;                          // e.g. "fault_fraction"
    std::vector<double> conditions;
    std::vector<std::vector<double>> errors;   // [condition][trial], tile units
    std::vector<double> mean;
    std::vector<double> stddev;
    int trials = 0;
    std::uint64_t seed = 0;
};

// Fills mean/stddev from the raw errors.
void finalize_sweep(SweepResult& r);

struct SweepConfig {
    int trials = 100;
    std::uint64_t seed = 0;
    int jobs = 1;
};

// Fault sweep: per condition and trial, a fresh fault mask (seeded by
// mix(base, condition, trial)) is applied to the trial's sample; rollout
// seeds are shared across conditions so only the faults differ.
SweepResult exp_fault(const Checkpoint& ckpt, const std::vector<Sample>& test_set,
                      const std::vector<double>& fractions, const SweepConfig& cfg);

// Noise sweep, same keying discipline with signal-relative Gaussian noise.
SweepResult exp_noise(const Checkpoint& ckpt, const std::vector<Sample>& test_set,
                      const std::vector<double>& levels, const SweepConfig& cfg);

struct ScaleConfig {
    std::vector<int> sizes{4, 8, 16, 32, 64};
    int samples_per_size = 50;
    std::uint64_t seed = 0;
    int jobs = 1;
    // When true, the rollout step range grows with the grid diameter
    // (relative to reference_size) so information can reach every agent;
    // off by default: the same 15-30 steps at every size.
    bool scale_steps = false;
    int reference_size = 8;
};

// Scalability sweep over grid sizes with per-size binary synthetic sets.
// Rejects a centralized checkpoint: a fixed-input-size model cannot
// rescale, which is the limitation under study.
SweepResult exp_scale(const Checkpoint& ckpt, const ScaleConfig& cfg);

struct PerformanceResult {
    std::vector<double> errors_calibrated;    // tile units
    std::vector<double> errors_uncalibrated;  // tile units
    double pitch_mm = 0.0;                    // 0 = unset; mm = tiles * pitch
    MannWhitneyResult test;
};

// Calibrated-vs-uncalibrated comparison: each model is evaluated on its
// own test set and the two error distributions are compared with the
// two-sided Mann-Whitney U test.
PerformanceResult exp_performance(const Checkpoint& calibrated, const Checkpoint& uncalibrated,
                                  const std::vector<Sample>& test_calibrated,
                                  const std::vector<Sample>& test_uncalibrated,
                                  std::uint64_t seed, double pitch_mm = 0.0, int jobs = 1);

// CSV schema: condition,trial,error.
void write_results(const SweepResult& result, const std::filesystem::path& path);
SweepResult read_results(const std::filesystem::path& path);

// Line plot of mean error with a +-std band per condition.
void render_plot(const SweepResult& result, const std::filesystem::path& path);

// Box plots (median, quartiles, whiskers) of labeled error distributions.
void render_box_plot(const std::vector<std::vector<double>>& groups,
                     const std::vector<std::string>& labels,
                     const std::filesystem::path& path);

}  // namespace nca
