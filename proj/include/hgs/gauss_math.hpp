// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace hgs {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Unit quaternion (w, x, y, z) with canonical sign: w >= 0, and when w == 0
// the first nonzero of (x, y, z) is >= 0.
struct UnitQuat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    UnitQuat() = default;
    UnitQuat(double w_, double x_, double y_, double z_);

    static UnitQuat identity() { return UnitQuat(); }
    // Normalizes an arbitrary nonzero 4-vector and canonicalizes the sign.
    static UnitQuat normalized(double w, double x, double y, double z);

    double norm() const;
    Vec4 coeffs() const { return Vec4(w, x, y, z); }
};

// Left/right isoclinic pair (a,b,c,d) and (p,q,r,s) generating a 4D rotation.
struct QuatPair {
    UnitQuat left;
    UnitQuat right;

    static QuatPair identity() { return {}; }
};

// Conditional spatial Gaussian of a 4D Gaussian at a fixed time, plus the
// marginal temporal density factor used to modulate opacity.
struct TemporalSlice {
    Vec3 mean3;
    Mat3 cov3;
    double temporal_weight = 1.0;  // in (0, 1], 1 iff t == mu_t
};

Mat3 quat_to_rot3(const UnitQuat& q);
UnitQuat rot3_to_quat(const Mat3& rot);

// The left/right isoclinic factor matrices and their product R = R_l * R_r.
Mat4 left_isoclinic(const UnitQuat& q);
Mat4 right_isoclinic(const UnitQuat& q);
Mat4 rot4_from_pair(const QuatPair& pair);

// Factors an SO(4) matrix into an isoclinic pair (inverse of rot4_from_pair,
// up to joint sign). Used when synthesizing 4D Gaussians from target
// covariances.
QuatPair pair_from_rot4(const Mat4& rot);

// Sigma = R diag(exp(2 s)) R^T.
Mat3 build_cov3(const Mat3& rot, const Vec3& log_scales);
Mat4 build_cov4(const Mat4& rot, const Vec4& log_scales);

// Conditions the 4D Gaussian (mean4, cov4) on t via the Schur complement;
// throws DegenerateTemporalError when cov4(3,3) < 1e-12.
TemporalSlice condition_at_time(const Vec4& mean4, const Mat4& cov4, double t);

// Nearest proper rotation to the top-left 3x3 block (polar factor), plus the
// Frobenius norm of the space-time mixing entries.
struct SpatialRot {
    Mat3 rot;
    double leakage = 0.0;
};
SpatialRot extract_spatial_rot(const Mat4& rot4);

// Symmetrize and clamp eigenvalues below at eps. Throws std::invalid_argument
// if the minimum eigenvalue is below -1e-8 (not a rounding artifact).
Mat3 clamp_psd(const Mat3& m, double eps = 1e-12);

bool is_rotation(const Mat3& m, double tol = 1e-8);
bool is_rotation4(const Mat4& m, double tol = 1e-8);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace hgs
