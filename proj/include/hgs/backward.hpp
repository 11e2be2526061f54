// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "hgs/raster.hpp"

namespace hgs {

// Gradients of a scalar loss wrt every parameter of both pools. Quaternion
// gradients are through-normalization (tangent-space), matching a finite
// difference that perturbs a raw component and renormalizes.
struct Grad3D {
    Vec3 mean = Vec3::Zero();
    Vec4 quat = Vec4::Zero();
    Vec3 log_scales = Vec3::Zero();
    double opacity_logit = 0.0;
    std::vector<Vec3> sh;
    double screen_norm = 0.0;  // |dL/d(screen mean)|, for densification
};

struct Grad4D {
    Vec3 mean_x = Vec3::Zero();
    double mean_t = 0.0;
    Vec4 quat_left = Vec4::Zero();
    Vec4 quat_right = Vec4::Zero();
    Vec4 log_scales = Vec4::Zero();
    double opacity_logit = 0.0;
    std::vector<Vec3> sh;
    double screen_norm = 0.0;
};

struct SceneGrads {
    std::vector<Grad3D> statics;
    std::vector<Grad4D> dynamics;

    void resize_like(const HybridScene& scene);
    void add_scaled(const SceneGrads& other, double scale);
};

// Per-primitive intermediates recorded by the taped forward pass.
struct PrimTape {
    SplatPrimitive splat;
    Vec3 cam_p;            // camera-space mean
    Mat3 cov3;             // covariance that went into projection
    Vec3 mean3;            // world-space (slice) mean
    double temporal_weight = 1.0;
    Vec3 raw_rgb;          // SH sum + 0.5, before the clamp at 0
    Vec3 view_dir;
    double view_dist = 0.0;
    bool alpha_clamped = false;
    // dynamics only
    Mat4 cov4 = Mat4::Zero();
    Mat4 rot4 = Mat4::Identity();
};

struct Tape {
    std::vector<PrimTape> prims;
    // Per pixel, the prim-tape indices actually composited, in order.
    std::vector<std::vector<uint32_t>> contribs;
    std::vector<double> final_trans;
    Vec3 background;
    double time = 0.0;
    int width = 0, height = 0;
};

// Tiled forward identical in arithmetic to rasterize(), recording the tape.
Image forward_train(const HybridScene& scene, const Camera& cam, double t,
                    const Vec3& background, const RasterOpts& opts, Tape& tape);

// Propagates dL/d(image) back to scene parameters; accumulates into grads
// (which must already be sized like the scene).
void backward(const HybridScene& scene, const Camera& cam, const Tape& tape,
              const Image& loss_grad, SceneGrads& grads);

}  // namespace hgs
