// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "hgs/gauss_math.hpp"

namespace hgs {

constexpr int kMaxShDegree = 3;
constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

// Spherical-harmonics color: (degree+1)^2 RGB triples, DC first, band-major.
struct SHColor {
    int degree = 0;
    std::vector<Vec3> coeffs;  // size (degree+1)^2

    SHColor() : coeffs(1, Vec3::Zero()) {}
    explicit SHColor(int deg) : degree(deg), coeffs(sh_coeff_count(deg), Vec3::Zero()) {}
    static SHColor from_rgb_dc(const Vec3& rgb, int degree);
};

// Real SH basis values Y_lm(dir) for l <= degree, in the same band-major
// order as SHColor. dir need not be unit here; eval_sh normalizes callers.
void sh_basis(const Vec3& dir, int degree, std::array<double, 16>& out);

// d(Y_lm)/d(dir) treating dir components as free variables (no unit
// constraint); callers chain the normalization Jacobian.
void sh_basis_grad(const Vec3& dir, int degree,
                   std::array<Vec3, 16>& out);

// RGB = clamp(sum c_lm Y_lm(dir) + 0.5, 0, 1); dir must be unit within 1e-6.
Vec3 eval_sh(const SHColor& color, const Vec3& view_dir);

}  // namespace hgs
