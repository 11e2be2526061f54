// SPDX-License-Identifier: Apache-2.0
#include "hgs/sh.hpp"

#include <cmath>
#include <stdexcept>

namespace hgs {

namespace {
constexpr double C0 = 0.28209479177387814;
constexpr double C1 = 0.4886025119029199;
constexpr double C2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                          -1.0925484305920792, 0.5462742152960396};
constexpr double C3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                          0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                          -0.5900435899266435};
}  // namespace

SHColor SHColor::from_rgb_dc(const Vec3& rgb, int degree) {
    SHColor c(degree);
    c.coeffs[0] = (rgb.array() - 0.5).matrix() / C0;
    return c;
}

void sh_basis(const Vec3& dir, int degree, std::array<double, 16>& out) {
    double x = dir[0], y = dir[1], z = dir[2];
    out[0] = C0;
    if (degree < 1) return;
    out[1] = -C1 * y;
    out[2] = C1 * z;
    out[3] = -C1 * x;
    if (degree < 2) return;
    double xx = x * x, yy = y * y, zz = z * z;
    out[4] = C2[0] * x * y;
    out[5] = C2[1] * y * z;
    out[6] = C2[2] * (2.0 * zz - xx - yy);
    out[7] = C2[3] * x * z;
    out[8] = C2[4] * (xx - yy);
    if (degree < 3) return;
    out[9] = C3[0] * y * (3.0 * xx - yy);
    out[10] = C3[1] * x * y * z;
    out[11] = C3[2] * y * (4.0 * zz - xx - yy);
    out[12] = C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    out[13] = C3[4] * x * (4.0 * zz - xx - yy);
    out[14] = C3[5] * z * (xx - yy);
    out[15] = C3[6] * x * (xx - 3.0 * yy);
}

void sh_basis_grad(const Vec3& dir, int degree, std::array<Vec3, 16>& out) {
    double x = dir[0], y = dir[1], z = dir[2];
    out[0].setZero();
    if (degree < 1) return;
    out[1] = Vec3(0, -C1, 0);
    out[2] = Vec3(0, 0, C1);
    out[3] = Vec3(-C1, 0, 0);
    if (degree < 2) return;
    double xx = x * x, yy = y * y, zz = z * z;
    out[4] = C2[0] * Vec3(y, x, 0);
    out[5] = C2[1] * Vec3(0, z, y);
    out[6] = C2[2] * Vec3(-2.0 * x, -2.0 * y, 4.0 * z);
    out[7] = C2[3] * Vec3(z, 0, x);
    out[8] = C2[4] * Vec3(2.0 * x, -2.0 * y, 0);
    if (degree < 3) return;
    out[9] = C3[0] * Vec3(6.0 * x * y, 3.0 * xx - 3.0 * yy, 0);
    out[10] = C3[1] * Vec3(y * z, x * z, x * y);
    out[11] = C3[2] * Vec3(-2.0 * x * y, 4.0 * zz - xx - 3.0 * yy, 8.0 * y * z);
    out[12] = C3[3] * Vec3(-6.0 * x * z, -6.0 * y * z, 6.0 * zz - 3.0 * xx - 3.0 * yy);
    out[13] = C3[4] * Vec3(4.0 * zz - 3.0 * xx - yy, -2.0 * x * y, 8.0 * x * z);
    out[14] = C3[5] * Vec3(2.0 * x * z, -2.0 * y * z, xx - yy);
    out[15] = C3[6] * Vec3(3.0 * xx - 3.0 * yy, -6.0 * x * y, 0);
}

Vec3 eval_sh(const SHColor& color, const Vec3& view_dir) {
    if (std::abs(view_dir.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("eval_sh: view direction must be unit");
    std::array<double, 16> basis{};
    sh_basis(view_dir, color.degree, basis);
    Vec3 rgb = Vec3::Zero();
    const int n = sh_coeff_count(color.degree);
    for (int i = 0; i < n; ++i) rgb += basis[i] * color.coeffs[i];
    rgb.array() += 0.5;
    return rgb.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace hgs
