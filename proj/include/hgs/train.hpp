// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <string>

#include "hgs/backward.hpp"
#include "hgs/data_io.hpp"
#include "hgs/optim.hpp"

namespace hgs {

struct LearningRates {
    double mean = 1.6e-4;        // scaled by scene extent, exponential decay
    double mean_final_ratio = 0.01;
    double mean_t = 1.6e-4;      // normalized time units
    double quat = 1e-3;
    double scales = 5e-3;
    double opacity = 5e-2;
    double sh = 2.5e-3;
};

struct TrainConfig {
    int iterations = 2000;
    int batch_size = 2;
    int warmup_iters = 500;
    int densify_interval = 100;
    int densify_stop_iter = 1500;
    double grad_threshold = 0.02;     // screen-space px gradient, averaged
    double opacity_prune_eps = 0.005;
    double tau = 0.5;
    bool conversion_enabled = true;   // false = pure 4DGS baseline mode
    double ssim_lambda = 0.2;
    LearningRates lrs;
    bool opacity_reset_enabled = false;
    int opacity_reset_interval = 600;
    uint64_t seed = 0;
    int sh_degree = 1;
    double weight_cutoff = kDefaultWeightCutoff;
    std::size_t max_gaussians = 20000;  // per-pool cap for densification
    double clone_size_frac = 0.01;      // size gate, fraction of scene extent
    double split_factor = 1.6;
    int num_threads = 1;
    int probe_interval = 100;           // PSNR probe cadence, 0 = off
    double init_temporal_scale = 0.1;
    double init_opacity = 0.1;

    void validate() const;
    static TrainConfig from_file(const std::string& path);
};

struct TrainLogRow {
    int iter = 0;
    double loss = 0.0;
    double probe_psnr = -1.0;  // -1 when not probed this iteration
    std::size_t n_static = 0, n_dynamic = 0;
    std::size_t conversions = 0;  // from the sweep at this iteration, else 0
    double wall_seconds = 0.0;
};

struct TrainLog {
    std::vector<TrainLogRow> rows;
    void write_csv(const std::string& path) const;
};

// Bias-corrected adaptive-moment update applied in place; quaternions are
// renormalized after the step. Non-finite gradients skip their parameter.
void optimizer_step(HybridScene& scene, const SceneGrads& grads, GradAccum& state,
                    const LearningRates& lrs, double mean_lr_scale = 1.0);

struct DensifyReport {
    std::size_t cloned3 = 0, split3 = 0, pruned3 = 0;
    std::size_t cloned4 = 0, split4 = 0, pruned4 = 0;
    std::size_t total() const { return cloned3 + split3 + pruned3 + cloned4 + split4 + pruned4; }
};

// Clone/split high-gradient Gaussians and prune transparent ones, per pool
// independently; optimizer state rows are remapped alongside.
DensifyReport densify_and_prune(HybridScene& scene, GradAccum& accum,
                                const TrainConfig& cfg, std::mt19937_64& rng);

struct TrainResult {
    HybridScene scene;
    TrainLog log;
    GradAccum state;
};

TrainResult train(const MultiViewDataset& dataset, const TrainConfig& cfg);

// Continues training from an existing scene/state (used by checkpoints).
TrainResult train_scene(HybridScene scene, GradAccum state,
                        const MultiViewDataset& dataset, const TrainConfig& cfg);

}  // namespace hgs
