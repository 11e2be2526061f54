// SPDX-License-Identifier: Apache-2.0
#include "hgs/raster.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <thread>

#include "hgs/errors.hpp"

namespace hgs {

SplatBounds splat_bounds(const SplatPrimitive& s, int width, int height) {
    int mx = int(std::floor(s.screen_mean.x()));
    int my = int(std::floor(s.screen_mean.y()));
    SplatBounds b;
    b.x0 = std::max(0, mx - s.radius);
    b.x1 = std::min(width - 1, mx + s.radius);
    b.y0 = std::max(0, my - s.radius);
    b.y1 = std::min(height - 1, my + s.radius);
    return b;
}

std::optional<SplatPrimitive> project_3d(const Vec3& mean3, const Mat3& cov3,
                                         const Camera& cam, RenderStats* stats) {
    Vec3 p = cam.to_camera(mean3);
    double z = p.z();
    if (z < cam.near || z > cam.far) {
        if (stats) stats->culled_depth++;
        return std::nullopt;
    }
    SplatPrimitive s;
    s.depth = z;
    s.screen_mean = Vec2(cam.fx * p.x() / z + cam.cx, cam.fy * p.y() / z + cam.cy);

    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx / z, 0.0, -cam.fx * p.x() / (z * z),
           0.0, cam.fy / z, -cam.fy * p.y() / (z * z);
    Eigen::Matrix<double, 2, 3> tmat = jac * cam.rot;
    Mat2 cov2 = tmat * cov3 * tmat.transpose();
    cov2(0, 0) += kLowPass;
    cov2(1, 1) += kLowPass;

    double det = cov2(0, 0) * cov2(1, 1) - cov2(0, 1) * cov2(1, 0);
    if (det <= 1e-12) {
        if (stats) stats->culled_degenerate++;
        return std::nullopt;
    }
    s.conic << cov2(1, 1) / det, -cov2(0, 1) / det,
               -cov2(1, 0) / det, cov2(0, 0) / det;
    double mid = 0.5 * (cov2(0, 0) + cov2(1, 1));
    double max_ev = mid + std::sqrt(std::max(0.0, mid * mid - det));
    s.radius = int(std::ceil(3.0 * std::sqrt(max_ev)));

    SplatBounds b = splat_bounds(s, cam.width, cam.height);
    if (b.empty()) {
        if (stats) stats->culled_offscreen++;
        return std::nullopt;
    }
    if (stats) stats->projected++;
    return s;
}

std::optional<SplatPrimitive> slice_project_4d(const Gaussian4D& g, double t,
                                               const Camera& cam, double weight_cutoff,
                                               RenderStats* stats) {
    TemporalSlice slice;
    try {
        slice = condition_at_time(g.mean4(), g.covariance4(), t);
    } catch (const DegenerateTemporalError&) {
        if (stats) stats->degenerate_temporal++;
        return std::nullopt;
    }
    if (slice.temporal_weight < weight_cutoff) {
        if (stats) stats->culled_temporal++;
        return std::nullopt;
    }
    auto proj = project_3d(slice.mean3, slice.cov3, cam, stats);
    if (!proj) return proj;
    proj->alpha = std::min(sigmoid(g.opacity_logit) * slice.temporal_weight, kAlphaClamp);
    Vec3 dir = slice.mean3 - cam.position();
    double n = dir.norm();
    proj->rgb = n > 0.0 ? eval_sh(g.color, dir / n) : eval_sh(g.color, Vec3(0, 0, 1));
    proj->source_pool = 1;
    return proj;
}

std::vector<SplatPrimitive> project_scene(const HybridScene& scene, const Camera& cam,
                                          double t, double weight_cutoff,
                                          RenderStats* stats) {
    std::vector<SplatPrimitive> prims;
    prims.reserve(scene.total());
    for (uint32_t i = 0; i < scene.dynamics.size(); ++i) {
        auto s = slice_project_4d(scene.dynamics[i], t, cam, weight_cutoff, stats);
        if (s) {
            s->source_index = i;
            prims.push_back(*s);
        }
    }
    for (uint32_t i = 0; i < scene.statics.size(); ++i) {
        const Gaussian3D& g = scene.statics[i];
        auto s = project_3d(g.mean, g.covariance3(), cam, stats);
        if (s) {
            s->alpha = std::min(sigmoid(g.opacity_logit), kAlphaClamp);
            Vec3 dir = g.mean - cam.position();
            double n = dir.norm();
            s->rgb = n > 0.0 ? eval_sh(g.color, dir / n) : eval_sh(g.color, Vec3(0, 0, 1));
            s->source_pool = 0;
            s->source_index = i;
            prims.push_back(*s);
        }
    }
    return prims;
}

namespace {

// Front-to-back compositing of one pixel over a depth-ordered instance list.
// `order` holds indices into `prims`; only splats whose radius box covers the
// pixel contribute. Identical arithmetic in both renderers.
template <typename Iter>
void composite_pixel(int px, int py, Iter begin, Iter end,
                     const std::vector<SplatPrimitive>& prims,
                     const Vec3& background, int width, int height,
                     Vec3& out_rgb, uint32_t* out_count, double* out_trans) {
    double trans = 1.0;
    Vec3 acc = Vec3::Zero();
    uint32_t count = 0;
    Vec2 pc(px + 0.5, py + 0.5);
    for (Iter it = begin; it != end; ++it) {
        const SplatPrimitive& s = prims[*it];
        SplatBounds b = splat_bounds(s, width, height);
        if (px < b.x0 || px > b.x1 || py < b.y0 || py > b.y1) continue;
        if (out_count) count++;
        Vec2 d = pc - s.screen_mean;
        double power = 0.5 * d.dot(s.conic * d);
        double a = s.alpha * std::exp(-power);
        if (a < kAlphaCutoff) continue;
        acc += s.rgb * (a * trans);
        trans *= 1.0 - a;
        if (trans < kTransmittanceFloor) break;
    }
    out_rgb = acc + trans * background;
    if (out_count) *out_count = count;
    if (out_trans) *out_trans = trans;
}

void run_tiles(int tile_count, int num_threads, const std::function<void(int)>& work) {
    if (num_threads <= 1) {
        for (int i = 0; i < tile_count; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(num_threads));
    for (int t = 0; t < num_threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < tile_count; i = next.fetch_add(1)) work(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

RenderOutput rasterize(const HybridScene& scene, const Camera& cam, double t,
                       const Vec3& background, const RasterOpts& opts) {
    cam.validate();
    RenderOutput out;
    out.rgb = Image(cam.width, cam.height);
    if (opts.count_map) out.counts.assign(out.rgb.pixels(), 0);
    if (opts.transmittance_map) out.transmittance.assign(out.rgb.pixels(), 1.0);

    std::vector<SplatPrimitive> prims =
        project_scene(scene, cam, t, opts.weight_cutoff, &out.stats);

    const int tiles_x = (cam.width + kTileSize - 1) / kTileSize;
    const int tiles_y = (cam.height + kTileSize - 1) / kTileSize;
    const int tile_count = tiles_x * tiles_y;

    // Duplicate each splat into every tile its radius box overlaps, keyed by
    // (tile_id, depth bits); primitive index breaks depth ties.
    struct Instance {
        uint64_t key;
        uint32_t prim;
        bool operator<(const Instance& o) const {
            return key != o.key ? key < o.key : prim < o.prim;
        }
    };
    std::vector<Instance> instances;
    for (uint32_t i = 0; i < prims.size(); ++i) {
        SplatBounds b = splat_bounds(prims[i], cam.width, cam.height);
        if (b.empty()) continue;
        uint32_t depth_bits = std::bit_cast<uint32_t>(float(prims[i].depth));
        for (int ty = b.y0 / kTileSize; ty <= b.y1 / kTileSize; ++ty)
            for (int tx = b.x0 / kTileSize; tx <= b.x1 / kTileSize; ++tx) {
                uint64_t tile_id = uint64_t(ty) * tiles_x + tx;
                instances.push_back({(tile_id << 32) | depth_bits, i});
            }
    }
    std::sort(instances.begin(), instances.end());

    // Tile ranges into the sorted instance list.
    std::vector<std::pair<std::size_t, std::size_t>> ranges(std::size_t(tile_count), {0, 0});
    for (std::size_t i = 0; i < instances.size();) {
        uint64_t tile_id = instances[i].key >> 32;
        std::size_t j = i;
        while (j < instances.size() && (instances[j].key >> 32) == tile_id) ++j;
        ranges[std::size_t(tile_id)] = {i, j};
        i = j;
    }

    run_tiles(tile_count, opts.num_threads, [&](int tile) {
        auto [lo, hi] = ranges[std::size_t(tile)];
        int tx = tile % tiles_x, ty = tile / tiles_x;
        int x0 = tx * kTileSize, y0 = ty * kTileSize;
        int x1 = std::min(cam.width, x0 + kTileSize);
        int y1 = std::min(cam.height, y0 + kTileSize);
        std::vector<uint32_t> order;
        order.reserve(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) order.push_back(instances[i].prim);
        for (int py = y0; py < y1; ++py)
            for (int px = x0; px < x1; ++px) {
                std::size_t pix = std::size_t(py) * cam.width + px;
                Vec3 rgb;
                composite_pixel(px, py, order.begin(), order.end(), prims, background,
                                cam.width, cam.height, rgb,
                                opts.count_map ? &out.counts[pix] : nullptr,
                                opts.transmittance_map ? &out.transmittance[pix] : nullptr);
                for (int c = 0; c < 3; ++c) out.rgb.at(px, py, c) = rgb[c];
            }
    });
    return out;
}

RenderOutput reference_render(const HybridScene& scene, const Camera& cam, double t,
                              const Vec3& background, const RasterOpts& opts) {
    cam.validate();
    RenderOutput out;
    out.rgb = Image(cam.width, cam.height);
    if (opts.count_map) out.counts.assign(out.rgb.pixels(), 0);
    if (opts.transmittance_map) out.transmittance.assign(out.rgb.pixels(), 1.0);

    std::vector<SplatPrimitive> prims =
        project_scene(scene, cam, t, opts.weight_cutoff, &out.stats);

    std::vector<uint32_t> order(prims.size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        float da = float(prims[a].depth), db = float(prims[b].depth);
        return da != db ? da < db : a < b;
    });

    for (int py = 0; py < cam.height; ++py)
        for (int px = 0; px < cam.width; ++px) {
            std::size_t pix = std::size_t(py) * cam.width + px;
            Vec3 rgb;
            composite_pixel(px, py, order.begin(), order.end(), prims, background,
                            cam.width, cam.height, rgb,
                            opts.count_map ? &out.counts[pix] : nullptr,
                            opts.transmittance_map ? &out.transmittance[pix] : nullptr);
            for (int c = 0; c < 3; ++c) out.rgb.at(px, py, c) = rgb[c];
        }
    return out;
}

std::vector<uint32_t> density_map(const HybridScene& scene, const Camera& cam, double t,
                                  bool dynamics_only, double weight_cutoff) {
    cam.validate();
    HybridScene view;
    const HybridScene* src = &scene;
    if (dynamics_only) {
        view.dynamics = scene.dynamics;
        view.tau = scene.tau;
        view.sh_degree = scene.sh_degree;
        src = &view;
    }
    std::vector<SplatPrimitive> prims = project_scene(*src, cam, t, weight_cutoff);
    std::vector<uint32_t> counts(std::size_t(cam.width) * cam.height, 0);
    for (const SplatPrimitive& s : prims) {
        SplatBounds b = splat_bounds(s, cam.width, cam.height);
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x) counts[std::size_t(y) * cam.width + x]++;
    }
    return counts;
}

}  // namespace hgs
