// SPDX-License-Identifier: Apache-2.0
// Independent reference implementations used to cross-check the library.
#pragma once

#include <random>

#include "hgs/camera.hpp"
#include "hgs/gauss_math.hpp"
#include "hgs/scene.hpp"

namespace oracle {

using hgs::Mat3;
using hgs::Mat4;
using hgs::Vec3;
using hgs::Vec4;

// Hamilton product in (w, x, y, z) component order.
inline Vec4 quat_mul(const Vec4& a, const Vec4& b) {
    return Vec4(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

inline hgs::UnitQuat random_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    return hgs::UnitQuat::normalized(nd(rng), nd(rng), nd(rng), nd(rng));
}

inline Mat4 random_psd4(std::mt19937_64& rng, double jitter = 1e-3) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat4 a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = nd(rng);
    return a * a.transpose() + jitter * Mat4::Identity();
}

// Conditioning through the precision matrix: mu_{x|t} = mu_x - Lxx^{-1} Lxt dt,
// Cov_{x|t} = Lxx^{-1}, with L the full 4x4 inverse. Algebraically equal to
// the Schur-complement path but numerically independent of it.
struct Conditional {
    Vec3 mean;
    Mat3 cov;
    double weight;
};

inline Conditional condition_via_precision(const Vec4& mean4, const Mat4& cov4, double t) {
    Mat4 prec = cov4.inverse();
    Mat3 lxx = prec.topLeftCorner<3, 3>();
    Vec3 lxt = prec.block<3, 1>(0, 3);
    double dt = t - mean4[3];
    Conditional c;
    c.cov = lxx.inverse();
    c.mean = mean4.head<3>() - c.cov * lxt * dt;
    // Ratio of the marginal time density to its peak.
    c.weight = std::exp(-0.5 * dt * dt / cov4(3, 3));
    return c;
}

// A random mixed scene within view of a random ring camera; sized for
// renderer-equivalence sweeps.
inline hgs::HybridScene random_scene(std::mt19937_64& rng, int n_static, int n_dynamic,
                                     int sh_degree = 1) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    hgs::HybridScene scene;
    scene.sh_degree = sh_degree;
    scene.extent = 2.0;
    for (int i = 0; i < n_static; ++i) {
        hgs::Gaussian3D g;
        g.mean = Vec3(nd(rng), nd(rng), nd(rng)) * 1.2;
        g.rot = random_quat(rng);
        g.log_scales = Vec3(std::log(0.05 + 0.3 * uni(rng)), std::log(0.05 + 0.3 * uni(rng)),
                            std::log(0.05 + 0.3 * uni(rng)));
        g.opacity_logit = hgs::logit(0.05 + 0.9 * uni(rng));
        g.color = hgs::SHColor::from_rgb_dc(Vec3(uni(rng), uni(rng), uni(rng)), sh_degree);
        for (std::size_t k = 1; k < g.color.coeffs.size(); ++k)
            g.color.coeffs[k] = 0.2 * Vec3(nd(rng), nd(rng), nd(rng));
        scene.statics.push_back(std::move(g));
    }
    for (int i = 0; i < n_dynamic; ++i) {
        hgs::Gaussian4D g;
        g.mean_x = Vec3(nd(rng), nd(rng), nd(rng)) * 1.2;
        g.mean_t = uni(rng);
        g.rot.left = random_quat(rng);
        g.rot.right = random_quat(rng);
        g.log_scales = Vec4(std::log(0.05 + 0.3 * uni(rng)), std::log(0.05 + 0.3 * uni(rng)),
                            std::log(0.05 + 0.3 * uni(rng)), std::log(0.08 + 0.5 * uni(rng)));
        g.opacity_logit = hgs::logit(0.05 + 0.9 * uni(rng));
        g.color = hgs::SHColor::from_rgb_dc(Vec3(uni(rng), uni(rng), uni(rng)), sh_degree);
        for (std::size_t k = 1; k < g.color.coeffs.size(); ++k)
            g.color.coeffs[k] = 0.2 * Vec3(nd(rng), nd(rng), nd(rng));
        scene.dynamics.push_back(std::move(g));
    }
    return scene;
}

inline hgs::Camera random_camera(std::mt19937_64& rng, int width = 64, int height = 64) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double a = 2.0 * M_PI * uni(rng);
    double h = -1.5 + 3.0 * uni(rng);
    double r = 4.0 + 2.0 * uni(rng);
    hgs::Camera cam = hgs::Camera::look_at(Vec3(r * std::cos(a), h, r * std::sin(a)),
                                           Vec3::Zero(), Vec3(0, -1, 0), 60.0, width, height);
    cam.validate();
    return cam;
}

}  // namespace oracle
