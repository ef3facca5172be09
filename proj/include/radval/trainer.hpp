// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radval/dataset.hpp"
#include "radval/metrics.hpp"
#include "radval/optimizer.hpp"
#include "radval/render.hpp"

namespace radval {

// Raised when training blows up (non-finite loss or validation PSNR below
// 0 dB), usually a divergent learning rate.
class DivergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ValuationMode { kStepDelta, kRevisitDelta, kFixedState };

const char* valuation_mode_name(ValuationMode mode);
ValuationMode valuation_mode_from_name(const std::string& name);

struct TrainConfig {
    int epochs = 5;
    int rays_per_step = 500;
    OptimizerConfig optimizer;  // Adam(0.875, 0.999, 2e-6), lr 0.35
    int n_samples_per_ray = 64;
    std::uint64_t seed = 1;
    bool eval_every_step = true;
    ValuationMode valuation_mode = ValuationMode::kStepDelta;
    double valuation_resolution_scale = 0.5;
    bool jitter_samples = true;  // stratified quadrature; also keeps one-shot
                                 // score measurements honestly noisy
    Vec3i grid_dims{32, 32, 32};
    double density_raw_init = -2.0;
    double rgb_raw_init = 0.0;
    int fixed_state_epoch = 0;  // measurement epoch for fixed_state mode; 0 = last
    MetricConfig metrics;
};

void validate(const TrainConfig& cfg);

struct TrainState {
    VoxelGrid grid;
    Optimizer optimizer;
    GradAccumulator scratch{0};
    std::uint64_t seed = 0;
    int step = 0;   // completed steps
    int epoch = 1;  // current epoch, 1-based
};

TrainState make_initial_state(const TrainConfig& cfg);

struct StepRecord {
    int step = 0;   // global, 0-based
    int epoch = 0;  // 1-based
    int image_id = 0;
    double train_loss = 0.0;
    double val_psnr = 0.0;
    double val_l1 = 0.0;
};

// Pre-training validation metrics plus one record per training step.
struct StepLog {
    double baseline_psnr = 0.0;
    double baseline_l1 = 0.0;
    std::vector<StepRecord> records;
};

// CSV `step,epoch,image_id,train_loss,val_psnr,val_l1`, 9 significant
// digits; the baseline evaluation is the first row with step = -1.
void save_step_log(const std::string& path, const StepLog& log);
StepLog load_step_log(const std::string& path);

// Row-level pieces of the same format, for writers that stream the log as
// training progresses (each includes its newline).
std::string step_log_header();
std::string format_step_row(const StepRecord& r);
std::string format_baseline_row(double psnr, double l1);

// Image visit order for one epoch: a permutation of 0..n_images-1 drawn from
// a stream hashed from (seed, epoch), so epochs shuffle independently.
std::vector<int> epoch_schedule(std::uint64_t seed, int epoch, int n_images);

struct RaySample {
    int x = 0;
    int y = 0;
    Vec3 target;
    Ray ray;
};

// Uniform pixel sample without replacement from one image.
std::vector<RaySample> sample_pixel_rays(const ImageRecord& image, int rays_per_step, SplitMix64& rng);

// One optimizer update on the mean L1 over rays_per_step rays of this image.
// Pixel (and jitter) streams are derived from (state.seed, state.epoch,
// state.step); advances state.step. Returns the train loss.
double train_step(TrainState& state, const ImageRecord& image, const TrainConfig& cfg);

struct TrainObserver {
    std::function<void(double psnr, double l1)> on_baseline;
    std::function<void(const StepRecord&)> on_step;
};

struct TrainResult {
    TrainState state;
    StepLog log;
};

// The full loop: epochs x train-size steps, one image per step in epoch
// order, validation evaluated after every step (eval_every_step). In
// fixed_state mode the designated epoch's steps are each measured from the
// epoch-start snapshot and reverted (parameters and optimizer state) before
// the next. Observer callbacks fire as records are produced, so callers can
// stream the log even when a later step aborts.
TrainResult run_training(const Dataset& ds, const TrainConfig& cfg, const TrainObserver* observer = nullptr);

// Checkpoint = grid file plus a JSON sidecar holding optimizer moments and
// counters.
void save_checkpoint(const std::string& grid_path, const std::string& state_path, const TrainState& state);
TrainState load_checkpoint(const std::string& grid_path, const std::string& state_path);

}  // namespace radval
