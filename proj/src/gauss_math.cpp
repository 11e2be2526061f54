// SPDX-License-Identifier: Apache-2.0
#include "hgs/gauss_math.hpp"

#include <cmath>
#include <stdexcept>

#include "hgs/errors.hpp"

namespace hgs {

namespace {

void canonicalize(double& w, double& x, double& y, double& z) {
    bool flip = false;
    if (w < 0.0) {
        flip = true;
    } else if (w == 0.0) {
        if (x != 0.0) flip = x < 0.0;
        else if (y != 0.0) flip = y < 0.0;
        else flip = z < 0.0;
    }
    if (flip) { w = -w; x = -x; y = -y; z = -z; }
}

}  // namespace

UnitQuat::UnitQuat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {
    double n = norm();
    if (std::abs(n - 1.0) > 1e-6)
        throw std::invalid_argument("UnitQuat: input norm deviates from 1 by more than 1e-6");
    w /= n; x /= n; y /= n; z /= n;
    canonicalize(w, x, y, z);
}

UnitQuat UnitQuat::normalized(double w, double x, double y, double z) {
    double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("UnitQuat: cannot normalize zero/non-finite quaternion");
    w /= n; x /= n; y /= n; z /= n;
    canonicalize(w, x, y, z);
    UnitQuat q;
    q.w = w; q.x = x; q.y = y; q.z = z;
    return q;
}

double UnitQuat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Mat3 quat_to_rot3(const UnitQuat& q) {
    double n = q.norm();
    if (std::abs(n - 1.0) > 1e-6)
        throw std::invalid_argument("quat_to_rot3: non-unit quaternion");
    double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
         2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
         2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
    return r;
}

bool is_rotation(const Mat3& m, double tol) {
    return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(m.determinant() - 1.0) <= tol;
}

bool is_rotation4(const Mat4& m, double tol) {
    return (m.transpose() * m - Mat4::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(m.determinant() - 1.0) <= tol;
}

UnitQuat rot3_to_quat(const Mat3& r) {
    if (!is_rotation(r, 1e-6))
        throw std::invalid_argument("rot3_to_quat: input is not a rotation matrix");
    double tr = r.trace();
    double w, x, y, z;
    if (1.0 + tr >= 1e-6) {
        w = 0.5 * std::sqrt(1.0 + tr);
        x = (r(2, 1) - r(1, 2)) / (4.0 * w);
        y = (r(0, 2) - r(2, 0)) / (4.0 * w);
        z = (r(1, 0) - r(0, 1)) / (4.0 * w);
    } else {
        // Largest-diagonal branch for tr(R) near -1, where the w formula
        // divides by ~0.
        int i = 0;
        if (r(1, 1) > r(0, 0)) i = 1;
        if (r(2, 2) > r(i, i)) i = 2;
        int j = (i + 1) % 3, k = (i + 2) % 3;
        double s = std::sqrt(r(i, i) - r(j, j) - r(k, k) + 1.0);
        double v[3];
        v[i] = 0.5 * s;
        double inv = 0.5 / s;
        w = (r(k, j) - r(j, k)) * inv;
        v[j] = (r(j, i) + r(i, j)) * inv;
        v[k] = (r(k, i) + r(i, k)) * inv;
        x = v[0]; y = v[1]; z = v[2];
    }
    return UnitQuat::normalized(w, x, y, z);
}

Mat4 left_isoclinic(const UnitQuat& q) {
    double a = q.w, b = q.x, c = q.y, d = q.z;
    Mat4 m;
    m << a, -b, -c, -d,
         b,  a, -d,  c,
         c,  d,  a, -b,
         d, -c,  b,  a;
    return m;
}

Mat4 right_isoclinic(const UnitQuat& q) {
    double p = q.w, qq = q.x, r = q.y, s = q.z;
    Mat4 m;
    m << p, -qq, -r, -s,
         qq,  p,  s, -r,
         r,  -s,  p,  qq,
         s,   r, -qq, p;
    return m;
}

Mat4 rot4_from_pair(const QuatPair& pair) {
    return left_isoclinic(pair.left) * right_isoclinic(pair.right);
}

QuatPair pair_from_rot4(const Mat4& rot) {
    if (!is_rotation4(rot, 1e-6))
        throw std::invalid_argument("pair_from_rot4: input is not in SO(4)");
    // M_{ij} is bilinear in (q_l, q_r), so contracting M against the basis
    // matrices L(e_a) R(e_b) recovers a matrix proportional to q_l q_r^T.
    Mat4 outer = Mat4::Zero();
    for (int a = 0; a < 4; ++a) {
        UnitQuat ea;
        ea.w = a == 0; ea.x = a == 1; ea.y = a == 2; ea.z = a == 3;
        Mat4 la = left_isoclinic(ea);
        for (int b = 0; b < 4; ++b) {
            UnitQuat eb;
            eb.w = b == 0; eb.x = b == 1; eb.y = b == 2; eb.z = b == 3;
            Mat4 basis = la * right_isoclinic(eb);
            outer(a, b) = 0.25 * (rot.array() * basis.array()).sum();
        }
    }
    Eigen::JacobiSVD<Mat4> svd(outer, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec4 u = svd.matrixU().col(0);
    Vec4 v = svd.matrixV().col(0);
    QuatPair pair;
    pair.left = UnitQuat::normalized(u[0], u[1], u[2], u[3]);
    pair.right = UnitQuat::normalized(v[0], v[1], v[2], v[3]);
    // Canonical signs may have flipped the two factors independently.
    if ((rot4_from_pair(pair) - rot).cwiseAbs().maxCoeff() > 1e-6) {
        pair.right.w = -pair.right.w; pair.right.x = -pair.right.x;
        pair.right.y = -pair.right.y; pair.right.z = -pair.right.z;
    }
    return pair;
}

Mat3 build_cov3(const Mat3& rot, const Vec3& log_scales) {
    Mat3 m = rot * log_scales.array().exp().matrix().asDiagonal();
    return m * m.transpose();
}

Mat4 build_cov4(const Mat4& rot, const Vec4& log_scales) {
    Mat4 m = rot * log_scales.array().exp().matrix().asDiagonal();
    return m * m.transpose();
}

Mat3 clamp_psd(const Mat3& m, double eps) {
    Mat3 sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> es(sym);
    double min_ev = es.eigenvalues().minCoeff();
    if (min_ev >= eps) return sym;
    if (min_ev < -1e-8)
        throw std::invalid_argument("clamp_psd: matrix is indefinite beyond rounding tolerance");
    Vec3 ev = es.eigenvalues().cwiseMax(eps);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

TemporalSlice condition_at_time(const Vec4& mean4, const Mat4& cov4, double t) {
    double s44 = cov4(3, 3);
    if (s44 < 1e-12)
        throw DegenerateTemporalError("condition_at_time: temporal variance below 1e-12");
    Vec3 cross = cov4.block<3, 1>(0, 3);
    double dt = t - mean4[3];
    TemporalSlice slice;
    slice.mean3 = mean4.head<3>() + cross * (dt / s44);
    slice.cov3 = clamp_psd(cov4.topLeftCorner<3, 3>() - (cross * cross.transpose()) / s44);
    slice.temporal_weight = std::exp(-0.5 * dt * dt / s44);
    return slice;
}

SpatialRot extract_spatial_rot(const Mat4& rot4) {
    Mat3 block = rot4.topLeftCorner<3, 3>();
    Eigen::JacobiSVD<Mat3> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().maxCoeff() < 1e-9)
        throw DegenerateRotationError("extract_spatial_rot: spatial block is singular");
    Mat3 u = svd.matrixU(), v = svd.matrixV();
    Mat3 d = Mat3::Identity();
    if ((u * v.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    SpatialRot out;
    out.rot = u * d * v.transpose();
    out.leakage = std::sqrt(rot4.block<3, 1>(0, 3).squaredNorm() +
                            rot4.block<1, 3>(3, 0).squaredNorm());
    return out;
}

}  // namespace hgs
