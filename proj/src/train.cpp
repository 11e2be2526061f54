// SPDX-License-Identifier: Apache-2.0
#include "hgs/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "hgs/config.hpp"
#include "hgs/errors.hpp"
#include "hgs/loss.hpp"
#include "hgs/metrics.hpp"

namespace hgs {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-15;

bool all_finite(const double* g, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(g[i])) return false;
    return true;
}

// One Adam row: values, grads, moments of length dim.
void adam_row(double* value, const double* grad, double* m, double* v, std::size_t dim,
              double lr, double bc1, double bc2, std::size_t* skipped) {
    if (!all_finite(grad, dim)) {
        if (skipped) (*skipped)++;
        return;
    }
    for (std::size_t k = 0; k < dim; ++k) {
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * grad[k];
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
        double mhat = m[k] / bc1;
        double vhat = v[k] / bc2;
        value[k] -= lr * mhat / (std::sqrt(vhat) + kEps);
    }
}

// Renormalizes a quaternion after its Adam step; if the canonical sign flips,
// the first moment flips with it so momentum stays aligned.
UnitQuat renorm_quat(double* raw, double* m) {
    double n = std::sqrt(raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2] + raw[3] * raw[3]);
    double w = raw[0] / n, x = raw[1] / n, y = raw[2] / n, z = raw[3] / n;
    bool flip = w < 0.0 || (w == 0.0 && (x < 0.0 || (x == 0.0 && (y < 0.0 || (y == 0.0 && z < 0.0)))));
    if (flip)
        for (int k = 0; k < 4; ++k) m[k] = -m[k];
    return UnitQuat::normalized(w, x, y, z);
}

// Copies Adam rows `src_rows` (in order) from src into dst.
void remap_buf(const AdamBuf& src, AdamBuf& dst, const std::vector<std::size_t>& src_rows,
               std::size_t dim, std::size_t dst_rows) {
    dst.resize_rows(dst_rows, dim);
    for (std::size_t i = 0; i < src_rows.size(); ++i) {
        if (src_rows[i] == SIZE_MAX) continue;  // freshly created row, stays zero
        for (std::size_t k = 0; k < dim; ++k) {
            dst.m[i * dim + k] = src.m[src_rows[i] * dim + k];
            dst.v[i * dim + k] = src.v[src_rows[i] * dim + k];
        }
    }
}

Vec3 sample_normal3(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    double a = nd(rng), b = nd(rng), c = nd(rng);
    return Vec3(a, b, c);
}

}  // namespace

void TrainConfig::validate() const {
    if (warmup_iters > iterations && iterations > 0)
        throw std::invalid_argument("TrainConfig: warmup_iters must be <= iterations");
    if (densify_interval < 1)
        throw std::invalid_argument("TrainConfig: densify_interval must be >= 1");
    if (ssim_lambda < 0.0 || ssim_lambda > 1.0)
        throw std::invalid_argument("TrainConfig: ssim_lambda must be in [0,1]");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("TrainConfig: tau must be positive");
}

TrainConfig TrainConfig::from_file(const std::string& path) {
    KeyValueFile kv(path);
    TrainConfig cfg;
    kv.get("iterations", cfg.iterations);
    kv.get("batch_size", cfg.batch_size);
    kv.get("warmup_iters", cfg.warmup_iters);
    kv.get("densify_interval", cfg.densify_interval);
    kv.get("densify_stop_iter", cfg.densify_stop_iter);
    kv.get("grad_threshold", cfg.grad_threshold);
    kv.get("opacity_prune_eps", cfg.opacity_prune_eps);
    kv.get("tau", cfg.tau);
    kv.get("conversion_enabled", cfg.conversion_enabled);
    kv.get("ssim_lambda", cfg.ssim_lambda);
    kv.get("opacity_reset_enabled", cfg.opacity_reset_enabled);
    kv.get("opacity_reset_interval", cfg.opacity_reset_interval);
    kv.get("seed", cfg.seed);
    kv.get("sh_degree", cfg.sh_degree);
    kv.get("weight_cutoff", cfg.weight_cutoff);
    kv.get("max_gaussians", cfg.max_gaussians);
    kv.get("num_threads", cfg.num_threads);
    kv.get("probe_interval", cfg.probe_interval);
    kv.get("init_temporal_scale", cfg.init_temporal_scale);
    kv.get("init_opacity", cfg.init_opacity);
    kv.get("lr_mean", cfg.lrs.mean);
    kv.get("lr_mean_final_ratio", cfg.lrs.mean_final_ratio);
    kv.get("lr_mean_t", cfg.lrs.mean_t);
    kv.get("lr_quat", cfg.lrs.quat);
    kv.get("lr_scales", cfg.lrs.scales);
    kv.get("lr_opacity", cfg.lrs.opacity);
    kv.get("lr_sh", cfg.lrs.sh);
    kv.finish();
    cfg.validate();
    return cfg;
}

void TrainLog::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("TrainLog: cannot open " + path);
    out << "iter,loss,probe_psnr,n_static,n_dynamic,conversions,wall_seconds\n";
    for (const auto& r : rows)
        out << r.iter << ',' << r.loss << ',' << r.probe_psnr << ',' << r.n_static << ','
            << r.n_dynamic << ',' << r.conversions << ',' << r.wall_seconds << '\n';
}

void optimizer_step(HybridScene& scene, const SceneGrads& grads, GradAccum& state,
                    const LearningRates& lrs, double mean_lr_scale) {
    state.step++;
    const double bc1 = 1.0 - std::pow(kBeta1, double(state.step));
    const double bc2 = 1.0 - std::pow(kBeta2, double(state.step));
    const std::size_t sh_dim = 3 * std::size_t(sh_coeff_count(scene.sh_degree));
    const double lr_mean = lrs.mean * scene.extent * mean_lr_scale;
    const double lr_mean_t = lrs.mean_t * mean_lr_scale;

    for (std::size_t i = 0; i < scene.statics.size(); ++i) {
        Gaussian3D& g = scene.statics[i];
        const Grad3D& gr = grads.statics[i];
        auto& st = state.statics;
        adam_row(g.mean.data(), gr.mean.data(), &st.mean.m[i * 3], &st.mean.v[i * 3], 3,
                 lr_mean, bc1, bc2, &state.skipped_nonfinite);
        double q[4] = {g.rot.w, g.rot.x, g.rot.y, g.rot.z};
        adam_row(q, gr.quat.data(), &st.quat.m[i * 4], &st.quat.v[i * 4], 4, lrs.quat, bc1,
                 bc2, &state.skipped_nonfinite);
        g.rot = renorm_quat(q, &st.quat.m[i * 4]);
        adam_row(g.log_scales.data(), gr.log_scales.data(), &st.scales.m[i * 3],
                 &st.scales.v[i * 3], 3, lrs.scales, bc1, bc2, &state.skipped_nonfinite);
        adam_row(&g.opacity_logit, &gr.opacity_logit, &st.opacity.m[i], &st.opacity.v[i], 1,
                 lrs.opacity, bc1, bc2, &state.skipped_nonfinite);
        adam_row(g.color.coeffs[0].data(), gr.sh[0].data(), &st.sh.m[i * sh_dim],
                 &st.sh.v[i * sh_dim], sh_dim, lrs.sh, bc1, bc2, &state.skipped_nonfinite);
    }
    for (std::size_t i = 0; i < scene.dynamics.size(); ++i) {
        Gaussian4D& g = scene.dynamics[i];
        const Grad4D& gr = grads.dynamics[i];
        auto& st = state.dynamics;
        adam_row(g.mean_x.data(), gr.mean_x.data(), &st.mean_x.m[i * 3], &st.mean_x.v[i * 3],
                 3, lr_mean, bc1, bc2, &state.skipped_nonfinite);
        adam_row(&g.mean_t, &gr.mean_t, &st.mean_t.m[i], &st.mean_t.v[i], 1, lr_mean_t, bc1,
                 bc2, &state.skipped_nonfinite);
        double ql[4] = {g.rot.left.w, g.rot.left.x, g.rot.left.y, g.rot.left.z};
        adam_row(ql, gr.quat_left.data(), &st.quat_left.m[i * 4], &st.quat_left.v[i * 4], 4,
                 lrs.quat, bc1, bc2, &state.skipped_nonfinite);
        g.rot.left = renorm_quat(ql, &st.quat_left.m[i * 4]);
        double qr[4] = {g.rot.right.w, g.rot.right.x, g.rot.right.y, g.rot.right.z};
        adam_row(qr, gr.quat_right.data(), &st.quat_right.m[i * 4], &st.quat_right.v[i * 4],
                 4, lrs.quat, bc1, bc2, &state.skipped_nonfinite);
        g.rot.right = renorm_quat(qr, &st.quat_right.m[i * 4]);
        adam_row(g.log_scales.data(), gr.log_scales.data(), &st.scales.m[i * 4],
                 &st.scales.v[i * 4], 4, lrs.scales, bc1, bc2, &state.skipped_nonfinite);
        adam_row(&g.opacity_logit, &gr.opacity_logit, &st.opacity.m[i], &st.opacity.v[i], 1,
                 lrs.opacity, bc1, bc2, &state.skipped_nonfinite);
        adam_row(g.color.coeffs[0].data(), gr.sh[0].data(), &st.sh.m[i * sh_dim],
                 &st.sh.v[i * sh_dim], sh_dim, lrs.sh, bc1, bc2, &state.skipped_nonfinite);
    }
}

DensifyReport densify_and_prune(HybridScene& scene, GradAccum& accum, const TrainConfig& cfg,
                                std::mt19937_64& rng) {
    DensifyReport report;
    const std::size_t sh_dim = 3 * std::size_t(sh_coeff_count(scene.sh_degree));
    const double size_gate = cfg.clone_size_frac * scene.extent;
    const double log_split = std::log(cfg.split_factor);

    // --- statics pool ---
    {
        std::vector<Gaussian3D> out;
        std::vector<std::size_t> rows;  // source row per output entry, SIZE_MAX = new
        out.reserve(scene.statics.size());
        for (std::size_t i = 0; i < scene.statics.size(); ++i) {
            Gaussian3D& g = scene.statics[i];
            if (sigmoid(g.opacity_logit) < cfg.opacity_prune_eps) {
                report.pruned3++;
                continue;
            }
            double avg = accum.count3[i] > 0 ? accum.grad_norm3[i] / accum.count3[i] : 0.0;
            bool dense = avg > cfg.grad_threshold &&
                         out.size() + 2 <= cfg.max_gaussians;
            double max_scale = g.log_scales.array().exp().maxCoeff();
            if (dense && max_scale < size_gate) {
                Mat3 m = quat_to_rot3(g.rot) * g.log_scales.array().exp().matrix().asDiagonal();
                Gaussian3D clone = g;
                clone.mean += 0.1 * (m * sample_normal3(rng));
                out.push_back(g);
                rows.push_back(i);
                out.push_back(std::move(clone));
                rows.push_back(SIZE_MAX);
                report.cloned3++;
            } else if (dense) {
                Mat3 m = quat_to_rot3(g.rot) * g.log_scales.array().exp().matrix().asDiagonal();
                for (int c = 0; c < 2; ++c) {
                    Gaussian3D part = g;
                    part.mean += m * sample_normal3(rng);
                    part.log_scales.array() -= log_split;
                    out.push_back(std::move(part));
                    rows.push_back(SIZE_MAX);
                }
                report.split3++;
            } else {
                out.push_back(g);
                rows.push_back(i);
            }
        }
        PoolState3D remapped;
        remap_buf(accum.statics.mean, remapped.mean, rows, 3, out.size());
        remap_buf(accum.statics.quat, remapped.quat, rows, 4, out.size());
        remap_buf(accum.statics.scales, remapped.scales, rows, 3, out.size());
        remap_buf(accum.statics.opacity, remapped.opacity, rows, 1, out.size());
        remap_buf(accum.statics.sh, remapped.sh, rows, sh_dim, out.size());
        scene.statics = std::move(out);
        accum.statics = std::move(remapped);
        accum.grad_norm3.assign(scene.statics.size(), 0.0);
        accum.count3.assign(scene.statics.size(), 0);
    }

    // --- dynamics pool ---
    {
        std::vector<Gaussian4D> out;
        std::vector<std::size_t> rows;
        out.reserve(scene.dynamics.size());
        std::normal_distribution<double> nd(0.0, 1.0);
        for (std::size_t i = 0; i < scene.dynamics.size(); ++i) {
            Gaussian4D& g = scene.dynamics[i];
            if (sigmoid(g.opacity_logit) < cfg.opacity_prune_eps) {
                report.pruned4++;
                continue;
            }
            double avg = accum.count4[i] > 0 ? accum.grad_norm4[i] / accum.count4[i] : 0.0;
            bool dense = avg > cfg.grad_threshold &&
                         out.size() + 2 <= cfg.max_gaussians;
            double max_scale = g.log_scales.head<3>().array().exp().maxCoeff();
            if (dense && max_scale < size_gate) {
                Mat4 m4 = g.rotation4() * g.log_scales.array().exp().matrix().asDiagonal();
                Gaussian4D clone = g;
                Vec4 n(nd(rng), nd(rng), nd(rng), nd(rng));
                Vec4 jitter = 0.1 * (m4 * n);
                clone.mean_x += jitter.head<3>();
                out.push_back(g);
                rows.push_back(i);
                out.push_back(std::move(clone));
                rows.push_back(SIZE_MAX);
                report.cloned4++;
            } else if (dense) {
                Mat4 m4 = g.rotation4() * g.log_scales.array().exp().matrix().asDiagonal();
                for (int c = 0; c < 2; ++c) {
                    Gaussian4D part = g;
                    Vec4 n(nd(rng), nd(rng), nd(rng), nd(rng));
                    Vec4 sample = m4 * n;
                    part.mean_x += sample.head<3>();
                    part.mean_t += sample[3];
                    part.log_scales.array() -= log_split;
                    out.push_back(std::move(part));
                    rows.push_back(SIZE_MAX);
                }
                report.split4++;
            } else {
                out.push_back(g);
                rows.push_back(i);
            }
        }
        PoolState4D remapped;
        remap_buf(accum.dynamics.mean_x, remapped.mean_x, rows, 3, out.size());
        remap_buf(accum.dynamics.mean_t, remapped.mean_t, rows, 1, out.size());
        remap_buf(accum.dynamics.quat_left, remapped.quat_left, rows, 4, out.size());
        remap_buf(accum.dynamics.quat_right, remapped.quat_right, rows, 4, out.size());
        remap_buf(accum.dynamics.scales, remapped.scales, rows, 4, out.size());
        remap_buf(accum.dynamics.opacity, remapped.opacity, rows, 1, out.size());
        remap_buf(accum.dynamics.sh, remapped.sh, rows, sh_dim, out.size());
        scene.dynamics = std::move(out);
        accum.dynamics = std::move(remapped);
        accum.grad_norm4.assign(scene.dynamics.size(), 0.0);
        accum.count4.assign(scene.dynamics.size(), 0);
    }
    return report;
}

namespace {

// Moves converted optimizer rows from the dynamics state to the statics
// state: spatial, opacity, SH and the left quaternion survive conversion.
void remap_after_sweep(GradAccum& accum, const std::vector<std::size_t>& moved,
                       std::size_t n3_after, std::size_t n4_after, std::size_t sh_dim) {
    std::size_t n4_before = accum.count4.size();
    std::vector<bool> was_moved(n4_before, false);
    for (std::size_t i : moved) was_moved[i] = true;

    std::vector<std::size_t> rows3(n3_after, SIZE_MAX);
    std::size_t n3_before = accum.count3.size();
    for (std::size_t i = 0; i < n3_before; ++i) rows3[i] = i;

    // New statics rows inherit from the dynamics state; copy them manually
    // after remapping the surviving prefix.
    PoolState3D new3;
    remap_buf(accum.statics.mean, new3.mean, rows3, 3, n3_after);
    remap_buf(accum.statics.quat, new3.quat, rows3, 4, n3_after);
    remap_buf(accum.statics.scales, new3.scales, rows3, 3, n3_after);
    remap_buf(accum.statics.opacity, new3.opacity, rows3, 1, n3_after);
    remap_buf(accum.statics.sh, new3.sh, rows3, sh_dim, n3_after);
    for (std::size_t k = 0; k < moved.size(); ++k) {
        std::size_t dst = n3_before + k, src = moved[k];
        for (int c = 0; c < 3; ++c) {
            new3.mean.m[dst * 3 + c] = accum.dynamics.mean_x.m[src * 3 + c];
            new3.mean.v[dst * 3 + c] = accum.dynamics.mean_x.v[src * 3 + c];
            new3.scales.m[dst * 3 + c] = accum.dynamics.scales.m[src * 4 + c];
            new3.scales.v[dst * 3 + c] = accum.dynamics.scales.v[src * 4 + c];
        }
        for (int c = 0; c < 4; ++c) {
            new3.quat.m[dst * 4 + c] = accum.dynamics.quat_left.m[src * 4 + c];
            new3.quat.v[dst * 4 + c] = accum.dynamics.quat_left.v[src * 4 + c];
        }
        new3.opacity.m[dst] = accum.dynamics.opacity.m[src];
        new3.opacity.v[dst] = accum.dynamics.opacity.v[src];
        for (std::size_t c = 0; c < sh_dim; ++c) {
            new3.sh.m[dst * sh_dim + c] = accum.dynamics.sh.m[src * sh_dim + c];
            new3.sh.v[dst * sh_dim + c] = accum.dynamics.sh.v[src * sh_dim + c];
        }
    }

    std::vector<std::size_t> rows4;
    rows4.reserve(n4_after);
    for (std::size_t i = 0; i < n4_before; ++i)
        if (!was_moved[i]) rows4.push_back(i);
    PoolState4D new4;
    remap_buf(accum.dynamics.mean_x, new4.mean_x, rows4, 3, n4_after);
    remap_buf(accum.dynamics.mean_t, new4.mean_t, rows4, 1, n4_after);
    remap_buf(accum.dynamics.quat_left, new4.quat_left, rows4, 4, n4_after);
    remap_buf(accum.dynamics.quat_right, new4.quat_right, rows4, 4, n4_after);
    remap_buf(accum.dynamics.scales, new4.scales, rows4, 4, n4_after);
    remap_buf(accum.dynamics.opacity, new4.opacity, rows4, 1, n4_after);
    remap_buf(accum.dynamics.sh, new4.sh, rows4, sh_dim, n4_after);

    accum.statics = std::move(new3);
    accum.dynamics = std::move(new4);
    accum.grad_norm3.assign(n3_after, 0.0);
    accum.grad_norm4.assign(n4_after, 0.0);
    accum.count3.assign(n3_after, 0);
    accum.count4.assign(n4_after, 0);
}

}  // namespace

TrainResult train(const MultiViewDataset& dataset, const TrainConfig& cfg) {
    if (dataset.cameras.empty() || dataset.total_frames() == 0)
        throw std::invalid_argument("train: dataset is empty");
    InitConfig init;
    init.sh_degree = cfg.sh_degree;
    init.tau = cfg.tau;
    init.duration_seconds = dataset.duration_seconds;
    init.init_temporal_scale = cfg.init_temporal_scale;
    init.init_opacity = cfg.init_opacity;
    HybridScene scene = init_scene(dataset.init_points, init);
    GradAccum state;
    state.resize(scene.statics.size(), scene.dynamics.size(),
                 3 * std::size_t(sh_coeff_count(scene.sh_degree)));
    return train_scene(std::move(scene), std::move(state), dataset, cfg);
}

TrainResult train_scene(HybridScene scene, GradAccum state, const MultiViewDataset& dataset,
                        const TrainConfig& cfg) {
    cfg.validate();
    const std::size_t sh_dim = 3 * std::size_t(sh_coeff_count(scene.sh_degree));
    TrainResult result;
    std::mt19937_64 rng(cfg.seed);

    std::vector<std::pair<std::size_t, std::size_t>> samples;  // (camera, frame)
    for (std::size_t c = 0; c < dataset.frames.size(); ++c)
        for (std::size_t f = 0; f < dataset.frames[c].size(); ++f) samples.emplace_back(c, f);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);

    const std::size_t probe_cam = 0;
    const std::size_t probe_frame = dataset.frames[0].size() / 2;

    RasterOpts opts;
    opts.weight_cutoff = cfg.weight_cutoff;
    opts.num_threads = cfg.num_threads;

    const auto t_start = std::chrono::steady_clock::now();
    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        std::vector<std::pair<std::size_t, std::size_t>> batch(std::size_t(cfg.batch_size));
        for (auto& b : batch) b = samples[pick(rng)];

        std::vector<SceneGrads> per_image(batch.size());
        std::vector<double> losses(batch.size(), 0.0);
        auto run_one = [&](std::size_t bi) {
            const auto [ci, fi] = batch[bi];
            const Frame& frame = dataset.frames[ci][fi];
            Tape tape;
            Image rendered = forward_train(scene, dataset.cameras[ci], frame.time,
                                           dataset.background, opts, tape);
            Image lgrad;
            losses[bi] = photometric_loss_with_grad(rendered, frame.image, cfg.ssim_lambda, lgrad);
            per_image[bi].resize_like(scene);
            backward(scene, dataset.cameras[ci], tape, lgrad, per_image[bi]);
        };
        if (cfg.num_threads > 1 && batch.size() > 1) {
            std::vector<std::thread> pool;
            for (std::size_t bi = 0; bi < batch.size(); ++bi) pool.emplace_back(run_one, bi);
            for (auto& th : pool) th.join();
        } else {
            for (std::size_t bi = 0; bi < batch.size(); ++bi) run_one(bi);
        }

        double loss = 0.0;
        SceneGrads grads;
        grads.resize_like(scene);
        for (std::size_t bi = 0; bi < batch.size(); ++bi) {
            loss += losses[bi];
            grads.add_scaled(per_image[bi], 1.0 / double(batch.size()));
            // Densification statistics: raw per-image screen gradients.
            for (std::size_t i = 0; i < scene.statics.size(); ++i)
                if (per_image[bi].statics[i].screen_norm > 0.0) {
                    state.grad_norm3[i] += per_image[bi].statics[i].screen_norm;
                    state.count3[i]++;
                }
            for (std::size_t i = 0; i < scene.dynamics.size(); ++i)
                if (per_image[bi].dynamics[i].screen_norm > 0.0) {
                    state.grad_norm4[i] += per_image[bi].dynamics[i].screen_norm;
                    state.count4[i]++;
                }
        }
        loss /= double(batch.size());
        if (!std::isfinite(loss))
            throw NumericAbort("train: non-finite loss at iteration " + std::to_string(iter));

        double decay = std::pow(cfg.lrs.mean_final_ratio, double(iter) / double(cfg.iterations));
        optimizer_step(scene, grads, state, cfg.lrs, decay);

        TrainLogRow row;
        row.iter = iter;
        row.loss = loss;

        if (iter >= cfg.warmup_iters && iter % cfg.densify_interval == 0) {
            if (iter <= cfg.densify_stop_iter) {
                densify_and_prune(scene, state, cfg, rng);
                if (cfg.opacity_reset_enabled && cfg.opacity_reset_interval > 0 &&
                    iter % cfg.opacity_reset_interval == 0) {
                    const double floor_logit = logit(0.01);
                    for (auto& g : scene.statics)
                        g.opacity_logit = std::min(g.opacity_logit, floor_logit);
                    for (auto& g : scene.dynamics)
                        g.opacity_logit = std::min(g.opacity_logit, floor_logit);
                }
            }
            if (cfg.conversion_enabled) {
                std::vector<std::size_t> moved;
                sweep_convert(scene, &moved);
                remap_after_sweep(state, moved, scene.statics.size(), scene.dynamics.size(),
                                  sh_dim);
                row.conversions = moved.size();
            }
        }

        if (cfg.probe_interval > 0 &&
            (iter % cfg.probe_interval == 0 || iter == cfg.iterations)) {
            const Frame& pf = dataset.frames[probe_cam][probe_frame];
            RenderOutput ro = rasterize(scene, dataset.cameras[probe_cam], pf.time,
                                        dataset.background, opts);
            row.probe_psnr = psnr(ro.rgb, pf.image);
        }
        row.n_static = scene.statics.size();
        row.n_dynamic = scene.dynamics.size();
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        result.log.rows.push_back(row);
    }

    result.scene = std::move(scene);
    result.state = std::move(state);
    return result;
}

}  // namespace hgs
