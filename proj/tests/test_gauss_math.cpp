// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "hgs/errors.hpp"
#include "hgs/gauss_math.hpp"
#include "oracles.hpp"

using namespace hgs;

TEST_CASE("unit quaternion validation and canonical sign") {
    CHECK_THROWS_AS(UnitQuat(1.0, 1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(UnitQuat::normalized(0.0, 0.0, 0.0, 0.0), std::invalid_argument);

    UnitQuat q = UnitQuat::normalized(-1.0, 2.0, -3.0, 4.0);
    CHECK(q.w > 0.0);
    CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-15));

    // w == 0: sign fixed by the first nonzero of (x, y, z).
    UnitQuat r = UnitQuat::normalized(0.0, -1.0, 0.5, 0.0);
    CHECK(r.x > 0.0);
}

TEST_CASE("quaternion/rotation roundtrips within 1e-9") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        UnitQuat q = oracle::random_quat(rng);
        Mat3 r = quat_to_rot3(q);
        CHECK(is_rotation(r, 1e-12));
        UnitQuat back = rot3_to_quat(r);
        CHECK((back.coeffs() - q.coeffs()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("rot3_to_quat largest-diagonal fallback near trace -1") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        // Rotation by pi about a random axis: trace = -1 exactly.
        Vec3 axis = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
        UnitQuat q = UnitQuat::normalized(0.0, axis[0], axis[1], axis[2]);
        Mat3 r = quat_to_rot3(q);
        UnitQuat back = rot3_to_quat(r);
        CHECK((back.coeffs() - q.coeffs()).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK_THROWS_AS(rot3_to_quat(2.0 * Mat3::Identity()), std::invalid_argument);
}

TEST_CASE("isoclinic construction matches quaternion-product oracle within 1e-12") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        QuatPair pair;
        pair.left = oracle::random_quat(rng);
        pair.right = oracle::random_quat(rng);
        Mat4 rot = rot4_from_pair(pair);
        CHECK(is_rotation4(rot, 1e-12));
        Vec4 x(nd(rng), nd(rng), nd(rng), nd(rng));
        // The dual path: R x = q_l * x * q_r as Hamilton products.
        Vec4 via_quat =
            oracle::quat_mul(pair.left.coeffs(), oracle::quat_mul(x, pair.right.coeffs()));
        CHECK((rot * x - via_quat).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + x.norm()));
        // And the factor matrices individually.
        CHECK((left_isoclinic(pair.left) * x - oracle::quat_mul(pair.left.coeffs(), x))
                  .cwiseAbs().maxCoeff() < 1e-12 * (1.0 + x.norm()));
        CHECK((right_isoclinic(pair.right) * x - oracle::quat_mul(x, pair.right.coeffs()))
                  .cwiseAbs().maxCoeff() < 1e-12 * (1.0 + x.norm()));
    }
}

TEST_CASE("identity pair gives identity rotation") {
    CHECK((rot4_from_pair(QuatPair::identity()) - Mat4::Identity()).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("pair_from_rot4 inverts rot4_from_pair") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 500; ++i) {
        QuatPair pair;
        pair.left = oracle::random_quat(rng);
        pair.right = oracle::random_quat(rng);
        Mat4 rot = rot4_from_pair(pair);
        QuatPair back = pair_from_rot4(rot);
        CHECK((rot4_from_pair(back) - rot).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK_THROWS_AS(pair_from_rot4(2.0 * Mat4::Identity()), std::invalid_argument);
}

TEST_CASE("covariance construction is symmetric PSD") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> uni(-2.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        QuatPair pair;
        pair.left = oracle::random_quat(rng);
        pair.right = oracle::random_quat(rng);
        Vec4 ls(uni(rng), uni(rng), uni(rng), uni(rng));
        Mat4 cov = build_cov4(rot4_from_pair(pair), ls);
        CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Mat4> es(cov);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        // Eigenvalues of R S S^T R^T are exactly exp(2 s), in some order.
        Vec4 expected = (2.0 * ls.array()).exp();
        std::sort(expected.data(), expected.data() + 4);
        CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() <
              1e-9 * expected.maxCoeff());

        Mat3 cov3 = build_cov3(quat_to_rot3(pair.left), ls.head<3>());
        CHECK((cov3 - cov3.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("clamp_psd symmetrizes, clamps, and rejects indefinite input") {
    Mat3 asym;
    asym << 1.0, 0.2, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
    Mat3 s = clamp_psd(asym);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Slightly negative eigenvalue within rounding tolerance: clamped up.
    Mat3 nearly = Mat3::Identity();
    nearly(2, 2) = -5e-9;
    Mat3 c = clamp_psd(nearly);
    Eigen::SelfAdjointEigenSolver<Mat3> es(c);
    CHECK(es.eigenvalues().minCoeff() >= 1e-12);

    Mat3 bad = Mat3::Identity();
    bad(2, 2) = -1.0;
    CHECK_THROWS_AS(clamp_psd(bad), std::invalid_argument);
}

TEST_CASE("condition_at_time matches dense conditioning oracle within 1e-10") {
    std::mt19937_64 rng(16);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        Mat4 cov = oracle::random_psd4(rng);
        Vec4 mean(nd(rng), nd(rng), nd(rng), uni(rng));
        double t = uni(rng);
        TemporalSlice slice = condition_at_time(mean, cov, t);
        oracle::Conditional ref = oracle::condition_via_precision(mean, cov, t);
        double scale = cov.cwiseAbs().maxCoeff();
        CHECK((slice.mean3 - ref.mean).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + scale));
        CHECK((slice.cov3 - ref.cov).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + scale));
        CHECK(slice.temporal_weight == doctest::Approx(ref.weight).epsilon(1e-12));
        CHECK(slice.temporal_weight <= 1.0);
        CHECK(slice.temporal_weight > 0.0);
    }
}

TEST_CASE("conditioning at t = mu_t leaves the mean and gives weight 1") {
    std::mt19937_64 rng(17);
    Mat4 cov = oracle::random_psd4(rng);
    Vec4 mean(0.3, -0.2, 0.9, 0.4);
    TemporalSlice slice = condition_at_time(mean, cov, 0.4);
    CHECK((slice.mean3 - mean.head<3>()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(slice.temporal_weight == 1.0);
}

TEST_CASE("block-diagonal covariance conditions to its spatial block") {
    Mat4 cov = Mat4::Zero();
    cov.topLeftCorner<3, 3>() << 0.4, 0.1, 0.0, 0.1, 0.3, 0.05, 0.0, 0.05, 0.2;
    cov(3, 3) = 0.09;
    Vec4 mean(1.0, 2.0, 3.0, 0.5);
    TemporalSlice slice = condition_at_time(mean, cov, 0.8);
    CHECK((slice.mean3 - mean.head<3>()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((slice.cov3 - cov.topLeftCorner<3, 3>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(slice.temporal_weight ==
          doctest::Approx(std::exp(-0.5 * 0.3 * 0.3 / 0.09)).epsilon(1e-12));
}

TEST_CASE("degenerate temporal variance is rejected") {
    Mat4 cov = Mat4::Identity();
    cov(3, 3) = 1e-13;
    CHECK_THROWS_AS(condition_at_time(Vec4::Zero(), cov, 0.5), DegenerateTemporalError);
}

TEST_CASE("extract_spatial_rot agrees with an SVD polar-factor oracle") {
    std::mt19937_64 rng(18);
    for (int i = 0; i < 500; ++i) {
        QuatPair pair;
        pair.left = oracle::random_quat(rng);
        pair.right = oracle::random_quat(rng);
        Mat4 rot = rot4_from_pair(pair);
        SpatialRot sr = extract_spatial_rot(rot);
        CHECK(is_rotation(sr.rot, 1e-9));
        // Polar factor maximizes tr(Q^T B): no rotation may beat it.
        Mat3 block = rot.topLeftCorner<3, 3>();
        double best = (sr.rot.transpose() * block).trace();
        for (int k = 0; k < 20; ++k) {
            Mat3 other = quat_to_rot3(oracle::random_quat(rng));
            CHECK((other.transpose() * block).trace() <= best + 1e-9);
        }
        // Leakage is the Frobenius norm of the mixing entries.
        double expect = std::sqrt(rot.block<3, 1>(0, 3).squaredNorm() +
                                  rot.block<1, 3>(3, 0).squaredNorm());
        CHECK(sr.leakage == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("block-diagonal rotation extracts exactly with zero leakage") {
    std::mt19937_64 rng(19);
    Mat3 r3 = quat_to_rot3(oracle::random_quat(rng));
    Mat4 rot = Mat4::Identity();
    rot.topLeftCorner<3, 3>() = r3;
    SpatialRot sr = extract_spatial_rot(rot);
    CHECK((sr.rot - r3).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sr.leakage == 0.0);
}
