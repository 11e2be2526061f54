// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "hgs/gauss_math.hpp"
#include "hgs/sh.hpp"

namespace hgs {

// Full spatio-temporal primitive. Time axis is in normalized sequence units.
struct Gaussian4D {
    Vec3 mean_x = Vec3::Zero();
    double mean_t = 0.5;
    QuatPair rot;
    Vec4 log_scales = Vec4::Zero();  // (s_x, s_y, s_z, s_t)
    double opacity_logit = 0.0;
    SHColor color;

    Mat4 rotation4() const { return rot4_from_pair(rot); }
    Mat4 covariance4() const { return build_cov4(rotation4(), log_scales); }
    Vec4 mean4() const { return Vec4(mean_x[0], mean_x[1], mean_x[2], mean_t); }
    double temporal_scale() const { return std::exp(log_scales[3]); }
};

// Static primitive.
struct Gaussian3D {
    Vec3 mean = Vec3::Zero();
    UnitQuat rot;
    Vec3 log_scales = Vec3::Zero();
    double opacity_logit = 0.0;
    SHColor color;

    Mat3 covariance3() const { return build_cov3(quat_to_rot3(rot), log_scales); }
};

struct ConversionReport {
    std::size_t count = 0;
    double max_leakage = 0.0;
    double mean_leakage = 0.0;
};

struct ScaleHistogram {
    std::vector<double> bin_edges;  // ascending, size counts.size() + 1
    std::vector<std::size_t> counts;
};

// The hybrid scene: static 3D pool + dynamic 4D pool.
struct HybridScene {
    std::vector<Gaussian3D> statics;
    std::vector<Gaussian4D> dynamics;
    double tau = 0.5;               // temporal-scale threshold, normalized time units
    double duration_seconds = 1.0;
    int sh_degree = 1;
    double extent = 1.0;            // spatial radius of the initial point cloud

    std::size_t total() const { return statics.size() + dynamics.size(); }
};

// exp(s_t) > tau, strictly; ties stay dynamic.
bool is_static(const Gaussian4D& g, double tau);

// Drops mu_t and s_t, projects the 4D rotation onto its spatial block, and
// folds the sequence-averaged temporal opacity weight into the opacity (a 3D
// Gaussian renders with weight 1 at every time; averaging minimizes the
// compositing change across the sequence). SH coefficients are copied
// unchanged, and in the wide-temporal limit the opacity is untouched.
Gaussian3D convert_4d_to_3d(const Gaussian4D& g);

// Moves every dynamic Gaussian above tau into the statics pool. Conversion
// order follows the dynamics pool order; survivors keep their relative order.
// When moved != nullptr, receives the dynamics indices that were converted
// (callers use it to remap optimizer state).
ConversionReport sweep_convert(HybridScene& scene, std::vector<std::size_t>* moved = nullptr);

// Histogram of exp(s_t) over the dynamics pool; overflow lands in the last bin.
ScaleHistogram temporal_scale_histogram(const HybridScene& scene, int bins, double max_scale);

}  // namespace hgs
