// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "hgs/raster.hpp"
#include "oracles.hpp"

using namespace hgs;

namespace {

Camera front_camera(int size = 32, double focal = 50.0) {
    return Camera::look_at(Vec3(0, 0, -3), Vec3::Zero(), Vec3(0, -1, 0), focal, size, size);
}

double max_image_diff(const Image& a, const Image& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

}  // namespace

TEST_CASE("empty scene renders pure background") {
    HybridScene scene;
    Vec3 bg(0.1, 0.5, 0.9);
    RenderOutput out = rasterize(scene, front_camera(), 0.3, bg, {});
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            for (int c = 0; c < 3; ++c) CHECK(out.rgb.at(x, y, c) == bg[c]);
}

TEST_CASE("on-axis projection matches the closed form") {
    Camera cam = front_camera(64, 80.0);
    double sigma = 0.2;
    Mat3 cov = sigma * sigma * Mat3::Identity();
    auto splat = project_3d(Vec3::Zero(), cov, cam);
    REQUIRE(splat.has_value());
    CHECK(splat->screen_mean[0] == doctest::Approx(cam.cx).epsilon(1e-12));
    CHECK(splat->screen_mean[1] == doctest::Approx(cam.cy).epsilon(1e-12));
    CHECK(splat->depth == doctest::Approx(3.0).epsilon(1e-12));
    // 2D covariance = (f/z)^2 sigma^2 I + low-pass, up to the second-order
    // Jacobian terms which vanish on axis.
    double expect = std::pow(80.0 / 3.0, 2) * sigma * sigma + kLowPass;
    Mat2 cov2 = splat->conic.inverse();
    CHECK(cov2(0, 0) == doctest::Approx(expect).epsilon(1e-3));
    CHECK(cov2(1, 1) == doctest::Approx(expect).epsilon(1e-3));
    CHECK(std::abs(cov2(0, 1)) < 1e-9);
}

TEST_CASE("behind-camera and out-of-range Gaussians are culled") {
    Camera cam = front_camera();
    RenderStats stats;
    CHECK_FALSE(project_3d(Vec3(0, 0, -10), 0.01 * Mat3::Identity(), cam, &stats).has_value());
    CHECK(stats.culled_depth == 1);
    Camera tight = cam;
    tight.far = 2.0;  // mean sits at z = 3
    CHECK_FALSE(project_3d(Vec3::Zero(), 0.01 * Mat3::Identity(), tight, &stats).has_value());
    // Far off-screen: culled by the radius box.
    CHECK_FALSE(project_3d(Vec3(50, 0, 0), 0.01 * Mat3::Identity(), cam, &stats).has_value());
    CHECK(stats.culled_offscreen >= 1);
}

TEST_CASE("screen covariance matches a finite-difference projection Jacobian") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> nd(0.0, 1.0);
    Camera cam = front_camera(64, 60.0);
    for (int i = 0; i < 50; ++i) {
        Vec3 mean(0.8 * nd(rng), 0.8 * nd(rng), 0.5 * nd(rng));
        Mat3 a;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) a(r, c) = 0.05 * nd(rng);
        Mat3 cov = a * a.transpose() + 1e-4 * Mat3::Identity();
        auto splat = project_3d(mean, cov, cam);
        if (!splat) continue;

        // Numeric Jacobian of p -> screen(p) at the camera-space mean.
        Vec3 cp = cam.to_camera(mean);
        auto screen = [&](const Vec3& q) {
            return Vec2(cam.fx * q[0] / q[2] + cam.cx, cam.fy * q[1] / q[2] + cam.cy);
        };
        const double h = 1e-6;
        Eigen::Matrix<double, 2, 3> jac;
        for (int c = 0; c < 3; ++c) {
            Vec3 qp = cp, qm = cp;
            qp[c] += h;
            qm[c] -= h;
            jac.col(c) = (screen(qp) - screen(qm)) / (2.0 * h);
        }
        Mat2 expect = jac * cam.rot * cov * cam.rot.transpose() * jac.transpose() +
                      kLowPass * Mat2::Identity();
        Mat2 got = splat->conic.inverse();
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-6 * expect.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("slice_project_4d composes the conditioning and projection oracles") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Camera cam = front_camera(64, 60.0);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        HybridScene scene = oracle::random_scene(rng, 0, 1);
        Gaussian4D& g = scene.dynamics[0];
        double t = uni(rng);
        auto splat = slice_project_4d(g, t, cam, 0.01);
        oracle::Conditional ref =
            oracle::condition_via_precision(g.mean4(), g.covariance4(), t);
        if (!splat) {
            // Must have been culled for a legitimate reason.
            bool temporal = ref.weight < 0.01;
            auto direct = project_3d(ref.mean, ref.cov, cam);
            CHECK((temporal || !direct.has_value()));
            continue;
        }
        ++checked;
        auto direct = project_3d(ref.mean, ref.cov, cam);
        REQUIRE(direct.has_value());
        CHECK((splat->screen_mean - direct->screen_mean).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((splat->conic - direct->conic).cwiseAbs().maxCoeff() <
              1e-8 * splat->conic.cwiseAbs().maxCoeff());
        CHECK(splat->alpha ==
              doctest::Approx(std::min(sigmoid(g.opacity_logit) * ref.weight, kAlphaClamp))
                  .epsilon(1e-8));
    }
    CHECK(checked >= 20);
}

TEST_CASE("single opaque splat composites in closed form") {
    Camera cam = front_camera(33, 40.0);  // odd size: pixel center at cx
    HybridScene scene;
    scene.sh_degree = 0;
    Gaussian3D g;
    g.mean = Vec3::Zero();
    g.log_scales = Vec3::Constant(std::log(0.3));
    g.opacity_logit = logit(0.7);
    g.color = SHColor::from_rgb_dc(Vec3(0.9, 0.1, 0.3), 0);
    scene.statics.push_back(g);
    Vec3 bg(0.0, 0.0, 1.0);
    RenderOutput out = rasterize(scene, cam, 0.0, bg, {});

    auto splat = project_3d(Vec3::Zero(), g.covariance3(), cam);
    REQUIRE(splat.has_value());
    // Pixel (16,16) center offset from the splat mean.
    Vec2 d = Vec2(16.5, 16.5) - splat->screen_mean;
    double alpha = std::min(sigmoid(g.opacity_logit), kAlphaClamp) *
                   std::exp(-0.5 * d.dot(splat->conic * d));
    Vec3 rgb = eval_sh(g.color, (g.mean - cam.position()).normalized());
    for (int c = 0; c < 3; ++c) {
        double expect = rgb[c] * alpha + bg[c] * (1.0 - alpha);
        CHECK(out.rgb.at(16, 16, c) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("rasterize matches reference_render on random mixed scenes") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        HybridScene scene = oracle::random_scene(rng, 15, 15);
        Camera cam = oracle::random_camera(rng);
        double t = uni(rng);
        RenderOutput a = rasterize(scene, cam, t, Vec3(0.2, 0.2, 0.2), {});
        RenderOutput b = reference_render(scene, cam, t, Vec3(0.2, 0.2, 0.2), {});
        CHECK(max_image_diff(a.rgb, b.rgb) <= 1e-5);
    }
}

TEST_CASE("rendering is bit-identical across thread counts") {
    std::mt19937_64 rng(44);
    HybridScene scene = oracle::random_scene(rng, 40, 40);
    Camera cam = oracle::random_camera(rng);
    RasterOpts o1, o4, o8;
    o1.num_threads = 1;
    o4.num_threads = 4;
    o8.num_threads = 8;
    Image a = rasterize(scene, cam, 0.37, Vec3::Zero(), o1).rgb;
    Image b = rasterize(scene, cam, 0.37, Vec3::Zero(), o4).rgb;
    Image c = rasterize(scene, cam, 0.37, Vec3::Zero(), o8).rgb;
    CHECK(a.data == b.data);
    CHECK(a.data == c.data);
}

TEST_CASE("density map covers exactly the radius boxes") {
    std::mt19937_64 rng(45);
    HybridScene scene = oracle::random_scene(rng, 5, 5);
    Camera cam = oracle::random_camera(rng, 48, 48);
    double t = 0.5;
    std::vector<uint32_t> counts = density_map(scene, cam, t);
    std::vector<uint32_t> expect(48 * 48, 0);
    for (const SplatPrimitive& s : project_scene(scene, cam, t, kDefaultWeightCutoff)) {
        SplatBounds b = splat_bounds(s, 48, 48);
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x) expect[std::size_t(y) * 48 + x]++;
    }
    CHECK(counts == expect);

    std::vector<uint32_t> dyn = density_map(scene, cam, t, true);
    for (std::size_t i = 0; i < dyn.size(); ++i) CHECK(dyn[i] <= counts[i]);
}

TEST_CASE("output pixels stay in range and finite") {
    std::mt19937_64 rng(46);
    for (int i = 0; i < 5; ++i) {
        HybridScene scene = oracle::random_scene(rng, 20, 20);
        Camera cam = oracle::random_camera(rng);
        RenderOutput out = rasterize(scene, cam, 0.5, Vec3(1.0, 1.0, 1.0), {});
        for (double v : out.rgb.data) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
        }
    }
}
