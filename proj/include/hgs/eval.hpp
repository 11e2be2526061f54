// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "hgs/metrics.hpp"
#include "hgs/train.hpp"

namespace hgs {

// Renders every frame of every camera in the dataset and scores it against
// the stored ground truth.
MetricReport evaluate_views(const HybridScene& scene, const MultiViewDataset& dataset,
                            const RasterOpts& opts = {});

struct AblationVariant {
    std::string name;
    TrainConfig config;
};

struct AblationRow {
    std::string name;
    bool failed = false;
    std::string error;
    double psnr = 0.0, ssim = 0.0;
    std::size_t n_dynamic = 0, n_static = 0;
    double wall_seconds = 0.0;
};

// Trains each variant on the train split and scores it on the held-out
// split. A variant that throws becomes a failed row, not a crash.
std::vector<AblationRow> run_ablation(const MultiViewDataset& train_split,
                                      const MultiViewDataset& held_out,
                                      const std::vector<AblationVariant>& variants);

// Matrix file: one variant per line, `name key=value key=value ...`,
// overrides applied on top of `base`.
std::vector<AblationVariant> load_ablation_matrix(const std::string& path,
                                                  const TrainConfig& base);

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);

}  // namespace hgs
