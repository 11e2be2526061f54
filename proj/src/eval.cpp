// SPDX-License-Identifier: Apache-2.0
#include "hgs/eval.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "hgs/errors.hpp"

namespace hgs {

MetricReport evaluate_views(const HybridScene& scene, const MultiViewDataset& dataset,
                            const RasterOpts& opts) {
    MetricReport report;
    for (std::size_t ci = 0; ci < dataset.cameras.size(); ++ci) {
        for (const Frame& frame : dataset.frames[ci]) {
            RenderOutput ro = rasterize(scene, dataset.cameras[ci], frame.time,
                                        dataset.background, opts);
            report.add(psnr(ro.rgb, frame.image), ssim(ro.rgb, frame.image));
        }
    }
    return report;
}

std::vector<AblationRow> run_ablation(const MultiViewDataset& train_split,
                                      const MultiViewDataset& held_out,
                                      const std::vector<AblationVariant>& variants) {
    std::vector<AblationRow> rows;
    for (const AblationVariant& variant : variants) {
        AblationRow row;
        row.name = variant.name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            TrainResult result = train(train_split, variant.config);
            RasterOpts opts;
            opts.weight_cutoff = variant.config.weight_cutoff;
            MetricReport report = evaluate_views(result.scene, held_out, opts);
            row.psnr = report.mean_psnr;
            row.ssim = report.mean_ssim;
            row.n_dynamic = result.scene.dynamics.size();
            row.n_static = result.scene.statics.size();
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

void apply_override(TrainConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&]() {
        if (value == "inf") return std::numeric_limits<double>::infinity();
        return std::stod(value);
    };
    auto as_int = [&]() { return std::stoi(value); };
    auto as_bool = [&]() {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        throw FormatError("ablation matrix: expected true/false for " + key);
    };
    if (key == "iterations") cfg.iterations = as_int();
    else if (key == "batch_size") cfg.batch_size = as_int();
    else if (key == "warmup_iters") cfg.warmup_iters = as_int();
    else if (key == "densify_interval") cfg.densify_interval = as_int();
    else if (key == "densify_stop_iter") cfg.densify_stop_iter = as_int();
    else if (key == "grad_threshold") cfg.grad_threshold = as_double();
    else if (key == "opacity_prune_eps") cfg.opacity_prune_eps = as_double();
    else if (key == "tau") cfg.tau = as_double();
    else if (key == "conversion_enabled") cfg.conversion_enabled = as_bool();
    else if (key == "ssim_lambda") cfg.ssim_lambda = as_double();
    else if (key == "opacity_reset_enabled") cfg.opacity_reset_enabled = as_bool();
    else if (key == "opacity_reset_interval") cfg.opacity_reset_interval = as_int();
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "sh_degree") cfg.sh_degree = as_int();
    else if (key == "weight_cutoff") cfg.weight_cutoff = as_double();
    else if (key == "max_gaussians") cfg.max_gaussians = std::stoull(value);
    else if (key == "num_threads") cfg.num_threads = as_int();
    else if (key == "probe_interval") cfg.probe_interval = as_int();
    else if (key == "init_temporal_scale") cfg.init_temporal_scale = as_double();
    else if (key == "init_opacity") cfg.init_opacity = as_double();
    else throw FormatError("ablation matrix: unknown key " + key);
}

}  // namespace

std::vector<AblationVariant> load_ablation_matrix(const std::string& path,
                                                  const TrainConfig& base) {
    std::ifstream in(path);
    if (!in) throw FormatError("ablation matrix: cannot open " + path);
    std::vector<AblationVariant> variants;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        AblationVariant v;
        if (!(ls >> v.name)) continue;
        v.config = base;
        std::string token;
        while (ls >> token) {
            auto eq = token.find('=');
            if (eq == std::string::npos)
                throw FormatError(path + ":" + std::to_string(lineno) +
                                  ": expected key=value, got " + token);
            try {
                apply_override(v.config, token.substr(0, eq), token.substr(eq + 1));
            } catch (const std::invalid_argument&) {
                throw FormatError(path + ":" + std::to_string(lineno) + ": bad value in " + token);
            }
        }
        v.config.validate();
        variants.push_back(std::move(v));
    }
    if (variants.empty()) throw FormatError(path + ": no variants");
    return variants;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("write_ablation_csv: cannot open " + path);
    out << "variant,status,psnr,ssim,n_4d,n_3d,wall_seconds\n";
    for (const AblationRow& r : rows) {
        out << r.name << ',' << (r.failed ? "failed" : "ok") << ',' << r.psnr << ','
            << r.ssim << ',' << r.n_dynamic << ',' << r.n_static << ',' << r.wall_seconds
            << '\n';
    }
}

}  // namespace hgs
