// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hgs/camera.hpp"
#include "hgs/image.hpp"
#include "hgs/scene.hpp"

namespace hgs {

constexpr int kTileSize = 16;
constexpr double kAlphaCutoff = 1.0 / 255.0;
constexpr double kTransmittanceFloor = 1e-4;
constexpr double kAlphaClamp = 0.999;
constexpr double kLowPass = 0.3;  // px^2 added to the 2D covariance
constexpr double kDefaultWeightCutoff = 0.05;

// Screen-space 2D Gaussian produced by projection/slicing.
struct SplatPrimitive {
    Vec2 screen_mean;       // pixels
    Mat2 conic;             // inverse 2D covariance, positive definite
    double depth = 0.0;     // camera z, scene units
    Vec3 rgb;               // linear color from SH
    double alpha = 0.0;     // sigmoid(opacity) * temporal_weight, < kAlphaClamp
    int radius = 0;         // ceil(3 * sqrt(max eigenvalue)) pixels
    int source_pool = 0;    // 0 = statics, 1 = dynamics
    uint32_t source_index = 0;
};

struct RenderStats {
    std::size_t culled_depth = 0;
    std::size_t culled_offscreen = 0;
    std::size_t culled_degenerate = 0;   // non-invertible 2D covariance
    std::size_t culled_temporal = 0;     // slice weight below cutoff
    std::size_t degenerate_temporal = 0; // sigma_tt below floor
    std::size_t projected = 0;
};

struct RasterOpts {
    double weight_cutoff = kDefaultWeightCutoff;
    int num_threads = 1;
    bool count_map = false;
    bool transmittance_map = false;
};

struct RenderOutput {
    Image rgb;
    std::vector<uint32_t> counts;        // optional, h*w
    std::vector<double> transmittance;   // optional, h*w
    RenderStats stats;
};

// Inclusive pixel bounds of a splat's radius box, clamped to the image.
// Empty when x0 > x1 or y0 > y1. Both renderers and the count map share this
// footprint definition so they agree exactly.
struct SplatBounds {
    int x0, x1, y0, y1;
    bool empty() const { return x0 > x1 || y0 > y1; }
};
SplatBounds splat_bounds(const SplatPrimitive& s, int width, int height);

std::optional<SplatPrimitive> project_3d(const Vec3& mean3, const Mat3& cov3,
                                         const Camera& cam, RenderStats* stats = nullptr);

std::optional<SplatPrimitive> slice_project_4d(const Gaussian4D& g, double t,
                                               const Camera& cam, double weight_cutoff,
                                               RenderStats* stats = nullptr);

// Projects both pools at time t: dynamics first, then statics, preserving
// pool order. Colors come from eval_sh at each Gaussian's viewing direction.
std::vector<SplatPrimitive> project_scene(const HybridScene& scene, const Camera& cam,
                                          double t, double weight_cutoff,
                                          RenderStats* stats = nullptr);

// Tiled compositing over (tile, depth, index)-sorted primitives.
RenderOutput rasterize(const HybridScene& scene, const Camera& cam, double t,
                       const Vec3& background, const RasterOpts& opts = {});

// Same math, single global depth sort, naive per-pixel loop. The oracle.
RenderOutput reference_render(const HybridScene& scene, const Camera& cam, double t,
                              const Vec3& background, const RasterOpts& opts = {});

// Per-pixel count of primitives whose radius box covers the pixel.
std::vector<uint32_t> density_map(const HybridScene& scene, const Camera& cam, double t,
                                  bool dynamics_only = false,
                                  double weight_cutoff = kDefaultWeightCutoff);

}  // namespace hgs
