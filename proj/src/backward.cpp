// SPDX-License-Identifier: Apache-2.0
#include "hgs/backward.hpp"

#include <array>
#include <cmath>

namespace hgs {

void SceneGrads::resize_like(const HybridScene& scene) {
    statics.assign(scene.statics.size(), Grad3D{});
    dynamics.assign(scene.dynamics.size(), Grad4D{});
    const std::size_t n_sh = std::size_t(sh_coeff_count(scene.sh_degree));
    for (auto& g : statics) g.sh.assign(n_sh, Vec3::Zero());
    for (auto& g : dynamics) g.sh.assign(n_sh, Vec3::Zero());
}

void SceneGrads::add_scaled(const SceneGrads& other, double scale) {
    for (std::size_t i = 0; i < statics.size(); ++i) {
        Grad3D& a = statics[i];
        const Grad3D& b = other.statics[i];
        a.mean += scale * b.mean;
        a.quat += scale * b.quat;
        a.log_scales += scale * b.log_scales;
        a.opacity_logit += scale * b.opacity_logit;
        for (std::size_t k = 0; k < a.sh.size(); ++k) a.sh[k] += scale * b.sh[k];
        a.screen_norm += b.screen_norm;
    }
    for (std::size_t i = 0; i < dynamics.size(); ++i) {
        Grad4D& a = dynamics[i];
        const Grad4D& b = other.dynamics[i];
        a.mean_x += scale * b.mean_x;
        a.mean_t += scale * b.mean_t;
        a.quat_left += scale * b.quat_left;
        a.quat_right += scale * b.quat_right;
        a.log_scales += scale * b.log_scales;
        a.opacity_logit += scale * b.opacity_logit;
        for (std::size_t k = 0; k < a.sh.size(); ++k) a.sh[k] += scale * b.sh[k];
        a.screen_norm += b.screen_norm;
    }
}

namespace {

Vec3 sh_color_raw(const SHColor& color, const Vec3& dir) {
    std::array<double, 16> basis{};
    sh_basis(dir, color.degree, basis);
    Vec3 rgb = Vec3::Zero();
    for (int i = 0; i < sh_coeff_count(color.degree); ++i) rgb += basis[i] * color.coeffs[i];
    rgb.array() += 0.5;
    return rgb;
}

// d(rotation matrix)/d(quaternion component), unit quaternion parameters.
Mat3 drot3_dq(const UnitQuat& q, int k) {
    double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 d;
    switch (k) {
        case 0:
            d << 0, -z, y, z, 0, -x, -y, x, 0;
            break;
        case 1:
            d << 0, y, z, y, -2 * x, -w, z, w, -2 * x;
            break;
        case 2:
            d << -2 * y, x, w, x, 0, z, -w, z, -2 * y;
            break;
        default:
            d << -2 * z, -w, x, w, -2 * z, y, x, y, 0;
            break;
    }
    return 2.0 * d;
}

Vec4 through_normalization(const Vec4& q, const Vec4& grad) {
    return grad - q.dot(grad) * q;
}

// Accumulators from the compositing backward, per primitive.
struct PrimAccum {
    Vec3 d_rgb = Vec3::Zero();
    double d_alpha = 0.0;  // wrt alpha_base (splat.alpha)
    Vec2 d_screen = Vec2::Zero();
    Mat2 d_conic = Mat2::Zero();
    bool touched = false;
};

}  // namespace

Image forward_train(const HybridScene& scene, const Camera& cam, double t,
                    const Vec3& background, const RasterOpts& opts, Tape& tape) {
    cam.validate();
    tape = Tape{};
    tape.background = background;
    tape.time = t;
    tape.width = cam.width;
    tape.height = cam.height;

    const Vec3 cam_pos = cam.position();
    for (uint32_t i = 0; i < scene.dynamics.size(); ++i) {
        const Gaussian4D& g = scene.dynamics[i];
        auto s = slice_project_4d(g, t, cam, opts.weight_cutoff);
        if (!s) continue;
        s->source_index = i;
        PrimTape pt;
        pt.cov4 = g.covariance4();
        pt.rot4 = g.rotation4();
        TemporalSlice slice = condition_at_time(g.mean4(), pt.cov4, t);
        pt.mean3 = slice.mean3;
        pt.cov3 = slice.cov3;
        pt.temporal_weight = slice.temporal_weight;
        pt.cam_p = cam.to_camera(slice.mean3);
        Vec3 v = slice.mean3 - cam_pos;
        pt.view_dist = v.norm();
        pt.view_dir = pt.view_dist > 0.0 ? Vec3(v / pt.view_dist) : Vec3(0, 0, 1);
        pt.raw_rgb = sh_color_raw(g.color, pt.view_dir);
        pt.alpha_clamped = sigmoid(g.opacity_logit) * slice.temporal_weight >= kAlphaClamp;
        pt.splat = *s;
        tape.prims.push_back(std::move(pt));
    }
    for (uint32_t i = 0; i < scene.statics.size(); ++i) {
        const Gaussian3D& g = scene.statics[i];
        Mat3 cov3 = g.covariance3();
        auto s = project_3d(g.mean, cov3, cam);
        if (!s) continue;
        s->alpha = std::min(sigmoid(g.opacity_logit), kAlphaClamp);
        s->source_pool = 0;
        s->source_index = i;
        PrimTape pt;
        pt.mean3 = g.mean;
        pt.cov3 = cov3;
        pt.cam_p = cam.to_camera(g.mean);
        Vec3 v = g.mean - cam_pos;
        pt.view_dist = v.norm();
        pt.view_dir = pt.view_dist > 0.0 ? Vec3(v / pt.view_dist) : Vec3(0, 0, 1);
        pt.raw_rgb = sh_color_raw(g.color, pt.view_dir);
        pt.alpha_clamped = sigmoid(g.opacity_logit) >= kAlphaClamp;
        s->rgb = pt.raw_rgb.cwiseMax(0.0).cwiseMin(1.0);
        pt.splat = *s;
        tape.prims.push_back(std::move(pt));
    }

    // Depth-sorted composite, recording per-pixel contribution lists.
    std::vector<uint32_t> order(tape.prims.size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        float da = float(tape.prims[a].splat.depth), db = float(tape.prims[b].splat.depth);
        return da != db ? da < db : a < b;
    });

    Image img(cam.width, cam.height);
    tape.contribs.resize(img.pixels());
    tape.final_trans.assign(img.pixels(), 1.0);
    for (int py = 0; py < cam.height; ++py)
        for (int px = 0; px < cam.width; ++px) {
            std::size_t pix = std::size_t(py) * cam.width + px;
            double trans = 1.0;
            Vec3 acc = Vec3::Zero();
            Vec2 pc(px + 0.5, py + 0.5);
            for (uint32_t oi : order) {
                const SplatPrimitive& s = tape.prims[oi].splat;
                SplatBounds b = splat_bounds(s, cam.width, cam.height);
                if (px < b.x0 || px > b.x1 || py < b.y0 || py > b.y1) continue;
                Vec2 d = pc - s.screen_mean;
                double a = s.alpha * std::exp(-0.5 * d.dot(s.conic * d));
                if (a < kAlphaCutoff) continue;
                acc += s.rgb * (a * trans);
                tape.contribs[pix].push_back(oi);
                trans *= 1.0 - a;
                if (trans < kTransmittanceFloor) break;
            }
            acc += trans * background;
            tape.final_trans[pix] = trans;
            for (int c = 0; c < 3; ++c) img.at(px, py, c) = acc[c];
        }
    return img;
}

void backward(const HybridScene& scene, const Camera& cam, const Tape& tape,
              const Image& loss_grad, SceneGrads& grads) {
    std::vector<PrimAccum> accum(tape.prims.size());

    // Compositing backward, pixel by pixel.
    for (int py = 0; py < tape.height; ++py)
        for (int px = 0; px < tape.width; ++px) {
            std::size_t pix = std::size_t(py) * tape.width + px;
            const auto& list = tape.contribs[pix];
            if (list.empty()) continue;
            Vec3 gpix(loss_grad.at(px, py, 0), loss_grad.at(px, py, 1), loss_grad.at(px, py, 2));
            if (gpix.isZero()) continue;
            Vec2 pc(px + 0.5, py + 0.5);
            const std::size_t n = list.size();
            // Recompute alphas and transmittances in forward order.
            std::vector<double> a_vals(n), t_vals(n), g_vals(n);
            double trans = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const SplatPrimitive& s = tape.prims[list[i]].splat;
                Vec2 d = pc - s.screen_mean;
                g_vals[i] = std::exp(-0.5 * d.dot(s.conic * d));
                a_vals[i] = s.alpha * g_vals[i];
                t_vals[i] = trans;
                trans *= 1.0 - a_vals[i];
            }
            // Reverse sweep with the suffix color sum.
            Vec3 suffix = trans * tape.background;
            for (std::size_t ri = n; ri-- > 0;) {
                const uint32_t prim = list[ri];
                const SplatPrimitive& s = tape.prims[prim].splat;
                PrimAccum& acc = accum[prim];
                acc.touched = true;
                double a = a_vals[ri], g = g_vals[ri], ti = t_vals[ri];
                acc.d_rgb += (a * ti) * gpix;
                double d_a = gpix.dot(s.rgb * ti - suffix / (1.0 - a));
                suffix += s.rgb * (a * ti);
                // a = alpha_base * g
                acc.d_alpha += g * d_a;
                double d_g = s.alpha * d_a;
                Vec2 d = pc - s.screen_mean;
                Vec2 qd = s.conic * d;
                acc.d_screen += (g * d_g) * qd;
                acc.d_conic += (-0.5 * g * d_g) * (d * d.transpose());
            }
        }

    // Per-primitive backward to scene parameters.
    const Vec3 cam_pos = cam.position();
    for (std::size_t pi = 0; pi < tape.prims.size(); ++pi) {
        if (!accum[pi].touched) continue;
        const PrimTape& pt = tape.prims[pi];
        const PrimAccum& acc = accum[pi];
        const SplatPrimitive& s = pt.splat;

        // conic = inverse 2D covariance
        Mat2 d_cov2 = -s.conic * acc.d_conic * s.conic;
        // cov2 = T cov3 T^T + lowpass, T = J * W
        double z = pt.cam_p.z(), xq = pt.cam_p.x(), yq = pt.cam_p.y();
        Eigen::Matrix<double, 2, 3> jac;
        jac << cam.fx / z, 0.0, -cam.fx * xq / (z * z),
               0.0, cam.fy / z, -cam.fy * yq / (z * z);
        Eigen::Matrix<double, 2, 3> tmat = jac * cam.rot;
        Mat3 d_cov3 = tmat.transpose() * d_cov2 * tmat;
        Eigen::Matrix<double, 2, 3> d_tmat = 2.0 * d_cov2 * tmat * pt.cov3;
        Eigen::Matrix<double, 2, 3> d_jac = d_tmat * cam.rot.transpose();

        // Camera-space mean gradient: screen-mean path plus J's dependence.
        Vec3 d_cam_p = jac.transpose() * acc.d_screen;
        d_cam_p.x() += d_jac(0, 2) * (-cam.fx / (z * z));
        d_cam_p.y() += d_jac(1, 2) * (-cam.fy / (z * z));
        d_cam_p.z() += d_jac(0, 0) * (-cam.fx / (z * z)) + d_jac(1, 1) * (-cam.fy / (z * z)) +
                       d_jac(0, 2) * (2.0 * cam.fx * xq / (z * z * z)) +
                       d_jac(1, 2) * (2.0 * cam.fy * yq / (z * z * z));
        Vec3 d_mean3 = cam.rot.transpose() * d_cam_p;

        // Color path: rgb = max(raw, 0), raw = sum + 0.5, dir = v/|v|.
        const int n_sh = sh_coeff_count(scene.sh_degree);
        Vec3 d_rgb_raw = acc.d_rgb;
        for (int c = 0; c < 3; ++c)
            if (pt.raw_rgb[c] < 0.0 || pt.raw_rgb[c] > 1.0) d_rgb_raw[c] = 0.0;
        std::array<double, 16> basis{};
        std::array<Vec3, 16> basis_grad{};
        sh_basis(pt.view_dir, scene.sh_degree, basis);
        sh_basis_grad(pt.view_dir, scene.sh_degree, basis_grad);
        const SHColor& color = s.source_pool == 0 ? scene.statics[s.source_index].color
                                                  : scene.dynamics[s.source_index].color;
        Vec3 d_dir = Vec3::Zero();
        std::vector<Vec3> d_sh(std::size_t(n_sh), Vec3::Zero());
        for (int k = 0; k < n_sh; ++k) {
            d_sh[std::size_t(k)] = basis[k] * d_rgb_raw;
            d_dir += basis_grad[k] * d_rgb_raw.dot(color.coeffs[std::size_t(k)]);
        }
        if (pt.view_dist > 0.0) {
            Mat3 jn = (Mat3::Identity() - pt.view_dir * pt.view_dir.transpose()) / pt.view_dist;
            d_mean3 += jn * d_dir;
        }

        double screen_norm = acc.d_screen.norm();

        if (s.source_pool == 0) {
            const Gaussian3D& g = scene.statics[s.source_index];
            Grad3D& out = grads.statics[s.source_index];
            out.mean += d_mean3;
            out.screen_norm += screen_norm;
            for (int k = 0; k < n_sh; ++k) out.sh[std::size_t(k)] += d_sh[std::size_t(k)];
            if (!pt.alpha_clamped) {
                double sg = sigmoid(g.opacity_logit);
                out.opacity_logit += acc.d_alpha * sg * (1.0 - sg);
            }
            // cov3 = M M^T, M = R diag(exp(s))
            Mat3 d_cov3_sym = 0.5 * (d_cov3 + d_cov3.transpose());
            Mat3 rot = quat_to_rot3(g.rot);
            Vec3 es = g.log_scales.array().exp();
            Mat3 m = rot * es.asDiagonal();
            Mat3 d_m = 2.0 * d_cov3_sym * m;
            for (int k = 0; k < 3; ++k)
                out.log_scales[k] += d_m.col(k).dot(m.col(k));
            Mat3 d_rot = d_m * es.asDiagonal();
            Vec4 d_quat;
            for (int k = 0; k < 4; ++k)
                d_quat[k] = (d_rot.array() * drot3_dq(g.rot, k).array()).sum();
            out.quat += through_normalization(g.rot.coeffs(), d_quat);
        } else {
            const Gaussian4D& g = scene.dynamics[s.source_index];
            Grad4D& out = grads.dynamics[s.source_index];
            out.screen_norm += screen_norm;
            for (int k = 0; k < n_sh; ++k) out.sh[std::size_t(k)] += d_sh[std::size_t(k)];

            double d_weight = 0.0;
            double sg = sigmoid(g.opacity_logit);
            if (!pt.alpha_clamped) {
                out.opacity_logit += acc.d_alpha * pt.temporal_weight * sg * (1.0 - sg);
                d_weight += acc.d_alpha * sg;
            }

            // Conditioning backward: slice (mean3, cov3, weight) -> (mean4, cov4).
            double s44 = pt.cov4(3, 3);
            Vec3 cross = pt.cov4.block<3, 1>(0, 3);
            double dt = tape.time - g.mean_t;
            Mat3 d_cov3_sym = 0.5 * (d_cov3 + d_cov3.transpose());
            Vec3 d_mean_slice = d_mean3;

            out.mean_x += d_mean_slice;
            out.mean_t += -d_mean_slice.dot(cross) / s44 +
                          d_weight * pt.temporal_weight * dt / s44;
            Vec3 d_cross = d_mean_slice * (dt / s44) - 2.0 * (d_cov3_sym * cross) / s44;
            double d_s44 = -d_mean_slice.dot(cross) * dt / (s44 * s44) +
                           cross.dot(d_cov3_sym * cross) / (s44 * s44) +
                           d_weight * pt.temporal_weight * 0.5 * dt * dt / (s44 * s44);
            Mat4 d_cov4 = Mat4::Zero();
            d_cov4.topLeftCorner<3, 3>() = d_cov3_sym;
            d_cov4.block<3, 1>(0, 3) = d_cross;
            d_cov4(3, 3) = d_s44;

            // cov4 = M4 M4^T, M4 = R4 diag(exp(s4))
            Vec4 es4 = g.log_scales.array().exp();
            Mat4 m4 = pt.rot4 * es4.asDiagonal();
            Mat4 d_m4 = (d_cov4 + d_cov4.transpose()) * m4;
            for (int k = 0; k < 4; ++k)
                out.log_scales[k] += d_m4.col(k).dot(m4.col(k));
            Mat4 d_rot4 = d_m4 * es4.asDiagonal();

            // R4 = L(ql) * R(qr); both factors are linear in their quaternions.
            Mat4 rmat = right_isoclinic(g.rot.right);
            Mat4 lmat = left_isoclinic(g.rot.left);
            Mat4 d_lmat = d_rot4 * rmat.transpose();
            Mat4 d_rmat = lmat.transpose() * d_rot4;
            Vec4 d_ql, d_qr;
            for (int k = 0; k < 4; ++k) {
                UnitQuat ek;
                ek.w = k == 0; ek.x = k == 1; ek.y = k == 2; ek.z = k == 3;
                d_ql[k] = (d_lmat.array() * left_isoclinic(ek).array()).sum();
                d_qr[k] = (d_rmat.array() * right_isoclinic(ek).array()).sum();
            }
            out.quat_left += through_normalization(g.rot.left.coeffs(), d_ql);
            out.quat_right += through_normalization(g.rot.right.coeffs(), d_qr);
        }
    }
}

}  // namespace hgs
