// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hgs/data_io.hpp"
#include "hgs/errors.hpp"
#include "hgs/raster.hpp"
#include "oracles.hpp"

using namespace hgs;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bool scenes_identical(const HybridScene& a, const HybridScene& b) {
    if (a.statics.size() != b.statics.size() || a.dynamics.size() != b.dynamics.size())
        return false;
    if (a.tau != b.tau || a.duration_seconds != b.duration_seconds ||
        a.sh_degree != b.sh_degree || a.extent != b.extent)
        return false;
    for (std::size_t i = 0; i < a.statics.size(); ++i) {
        const Gaussian3D &x = a.statics[i], &y = b.statics[i];
        if (x.mean != y.mean || x.log_scales != y.log_scales ||
            x.opacity_logit != y.opacity_logit || x.rot.coeffs() != y.rot.coeffs() ||
            x.color.degree != y.color.degree || x.color.coeffs != y.color.coeffs)
            return false;
    }
    for (std::size_t i = 0; i < a.dynamics.size(); ++i) {
        const Gaussian4D &x = a.dynamics[i], &y = b.dynamics[i];
        if (x.mean_x != y.mean_x || x.mean_t != y.mean_t || x.log_scales != y.log_scales ||
            x.opacity_logit != y.opacity_logit ||
            x.rot.left.coeffs() != y.rot.left.coeffs() ||
            x.rot.right.coeffs() != y.rot.right.coeffs() ||
            x.color.coeffs != y.color.coeffs)
            return false;
    }
    return true;
}

std::vector<char> read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

void write_all(const fs::path& p, const std::vector<char>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size()));
}

GradAccum random_state(std::mt19937_64& rng, std::size_t n3, std::size_t n4,
                       std::size_t sh_dim) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    GradAccum st;
    st.resize(n3, n4, sh_dim);
    auto fill = [&](AdamBuf& b) {
        for (double& v : b.m) v = uni(rng);
        for (double& v : b.v) v = std::abs(uni(rng));
    };
    for (AdamBuf* b : {&st.statics.mean, &st.statics.quat, &st.statics.scales,
                       &st.statics.opacity, &st.statics.sh, &st.dynamics.mean_x,
                       &st.dynamics.mean_t, &st.dynamics.quat_left, &st.dynamics.quat_right,
                       &st.dynamics.scales, &st.dynamics.opacity, &st.dynamics.sh})
        fill(*b);
    for (double& v : st.grad_norm3) v = std::abs(uni(rng));
    for (double& v : st.grad_norm4) v = std::abs(uni(rng));
    for (uint32_t& v : st.count3) v = uint32_t(rng() % 100);
    for (uint32_t& v : st.count4) v = uint32_t(rng() % 100);
    st.step = 1234;
    st.skipped_nonfinite = 7;
    return st;
}

}  // namespace

TEST_CASE("checkpoint roundtrip is bit-exact including optimizer state") {
    std::mt19937_64 rng(101);
    HybridScene scene = oracle::random_scene(rng, 50, 50, 2);
    scene.tau = 0.37;
    scene.duration_seconds = 2.5;
    scene.extent = 3.1;
    std::size_t sh_dim = 3 * std::size_t(sh_coeff_count(scene.sh_degree));
    GradAccum st = random_state(rng, 50, 50, sh_dim);

    fs::path dir = temp_dir("hgs_ckpt");
    std::string path = (dir / "a.hgsc").string();
    save_checkpoint(scene, &st, path);
    Checkpoint back = load_checkpoint(path);
    CHECK(scenes_identical(scene, back.scene));
    REQUIRE(back.state.has_value());
    CHECK(back.state->step == 1234);
    CHECK(back.state->skipped_nonfinite == 7);
    CHECK(back.state->statics.mean.m == st.statics.mean.m);
    CHECK(back.state->dynamics.sh.v == st.dynamics.sh.v);
    CHECK(back.state->grad_norm4 == st.grad_norm4);
    CHECK(back.state->count3 == st.count3);

    // Without state the state section is absent.
    std::string path2 = (dir / "b.hgsc").string();
    save_checkpoint(scene, nullptr, path2);
    Checkpoint bare = load_checkpoint(path2);
    CHECK(scenes_identical(scene, bare.scene));
    CHECK_FALSE(bare.state.has_value());
    // Two saves of the same scene produce identical bytes.
    std::string path3 = (dir / "c.hgsc").string();
    save_checkpoint(scene, nullptr, path3);
    CHECK(read_all(path2) == read_all(path3));
}

TEST_CASE("checkpoint corruption and truncation are rejected") {
    std::mt19937_64 rng(102);
    HybridScene scene = oracle::random_scene(rng, 8, 8);
    fs::path dir = temp_dir("hgs_ckpt_bad");
    std::string path = (dir / "good.hgsc").string();
    save_checkpoint(scene, nullptr, path);
    std::vector<char> bytes = read_all(path);
    REQUIRE(bytes.size() > 64);

    SUBCASE("flipped payload byte fails the checksum") {
        std::vector<char> bad = bytes;
        bad[bad.size() / 2] ^= 0x01;
        std::string p = (dir / "corrupt.hgsc").string();
        write_all(p, bad);
        CHECK_THROWS_AS(load_checkpoint(p), IntegrityError);
    }
    SUBCASE("truncated file is a format error") {
        for (std::size_t keep : {bytes.size() - 1, bytes.size() / 2, std::size_t(10)}) {
            std::vector<char> bad(bytes.begin(), bytes.begin() + std::ptrdiff_t(keep));
            std::string p = (dir / "trunc.hgsc").string();
            write_all(p, bad);
            CHECK_THROWS_AS(load_checkpoint(p), FormatError);
        }
    }
    SUBCASE("wrong magic is a format error") {
        std::vector<char> bad = bytes;
        bad[0] = 'X';
        std::string p = (dir / "magic.hgsc").string();
        write_all(p, bad);
        CHECK_THROWS_AS(load_checkpoint(p), FormatError);
    }
    SUBCASE("future version is rejected with its own error") {
        std::vector<char> bad = bytes;
        bad[4] = 99;  // little-endian u32 version follows the magic
        std::string p = (dir / "version.hgsc").string();
        write_all(p, bad);
        CHECK_THROWS_AS(load_checkpoint(p), UnsupportedVersionError);
    }
    SUBCASE("missing file is a format error") {
        CHECK_THROWS_AS(load_checkpoint((dir / "nope.hgsc").string()), FormatError);
    }
}

TEST_CASE("ppm roundtrip is pixel-exact after quantization") {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Image img(17, 9);
    for (double& v : img.data) v = uni(rng);
    fs::path dir = temp_dir("hgs_ppm");
    std::string path = (dir / "img.ppm").string();
    Image q = quantize_8bit(img);
    write_ppm(img, path);
    Image back = read_ppm(path);
    CHECK(back.width == 17);
    CHECK(back.height == 9);
    CHECK(back.data == q.data);
    // Quantization is idempotent.
    CHECK(quantize_8bit(q).data == q.data);
}

TEST_CASE("float dump roundtrip is exact") {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Image img(5, 7);
    for (double& v : img.data) v = uni(rng);
    fs::path dir = temp_dir("hgs_dump");
    std::string path = (dir / "img.hgsf").string();
    write_float_dump(img, path);
    Image back = read_float_dump(path);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(double(float(img.data[i])) == back.data[i]);
}

TEST_CASE("dataset save/load roundtrip preserves cameras, frames, and points") {
    SynthSpec spec;
    spec.n_static = 12;
    spec.n_dynamic = 1;
    spec.chain_length = 3;
    spec.n_cameras = 3;
    spec.n_frames = 3;
    spec.width = 24;
    spec.height = 24;
    spec.n_init_points = 20;
    SyntheticScene synth = generate_synthetic(spec, 11);
    fs::path dir = temp_dir("hgs_ds");
    save_synthetic(synth, dir.string());

    auto [train_ds, held] = load_dataset(dir.string(), /*held_out_camera=*/2);
    CHECK(train_ds.cameras.size() == 2);
    CHECK(held.cameras.size() == 1);
    CHECK(held.camera_ids == std::vector<int>{2});
    CHECK(train_ds.duration_seconds == doctest::Approx(spec.duration_seconds));
    CHECK(train_ds.init_points.size() == synth.init_points.size());
    for (std::size_t c = 0; c < train_ds.cameras.size(); ++c) {
        const Camera& a = train_ds.cameras[c];
        const Camera& b = synth.dataset.cameras[std::size_t(train_ds.camera_ids[c])];
        CHECK((a.rot - b.rot).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((a.trans - b.trans).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(a.fx == doctest::Approx(b.fx));
        for (std::size_t f = 0; f < train_ds.frames[c].size(); ++f) {
            CHECK(train_ds.frames[c][f].time ==
                  doctest::Approx(synth.dataset.frames[std::size_t(train_ds.camera_ids[c])][f]
                                      .time));
            // Frames were quantized before saving, so the roundtrip is exact.
            CHECK(train_ds.frames[c][f].image.data ==
                  synth.dataset.frames[std::size_t(train_ds.camera_ids[c])][f].image.data);
        }
    }

    CHECK_THROWS_AS(load_dataset(dir.string(), 99), FormatError);
    CHECK_THROWS_AS(load_dataset((dir / "missing").string(), -1), FormatError);
}

TEST_CASE("points roundtrip and init_scene shape") {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    InitPoints pts;
    for (int i = 0; i < 30; ++i) {
        InitPoint p;
        p.position = Vec3(uni(rng) * 4 - 2, uni(rng) * 4 - 2, uni(rng) * 4 - 2);
        p.rgb = Vec3(uni(rng), uni(rng), uni(rng));
        pts.push_back(p);
    }
    fs::path dir = temp_dir("hgs_pts");
    std::string path = (dir / "points.txt").string();
    save_points(pts, path);
    InitPoints back = load_points(path);
    REQUIRE(back.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK((back[i].position - pts[i].position).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((back[i].rgb - pts[i].rgb).cwiseAbs().maxCoeff() < 1e-9);
    }

    InitConfig cfg;
    cfg.sh_degree = 1;
    cfg.tau = 0.4;
    cfg.duration_seconds = 3.0;
    HybridScene scene = init_scene(pts, cfg);
    CHECK(scene.statics.empty());
    CHECK(scene.dynamics.size() == pts.size());
    CHECK(scene.tau == 0.4);
    CHECK(scene.duration_seconds == 3.0);
    CHECK(scene.sh_degree == 1);
    CHECK(scene.extent > 0.0);
    for (std::size_t i = 0; i < scene.dynamics.size(); ++i) {
        const Gaussian4D& g = scene.dynamics[i];
        CHECK(g.mean_x == pts[i].position);
        CHECK(g.temporal_scale() == doctest::Approx(cfg.init_temporal_scale));
        CHECK_FALSE(is_static(g, scene.tau));
        CHECK(sigmoid(g.opacity_logit) == doctest::Approx(cfg.init_opacity));
        CHECK(g.mean_t >= 0.0);
        CHECK(g.mean_t <= 1.0);
    }

    InitPoints few(pts.begin(), pts.begin() + 3);
    CHECK_THROWS_AS(init_scene(few, cfg), std::invalid_argument);
}

TEST_CASE("synthetic generation is deterministic and its frames match renders") {
    SynthSpec spec;
    spec.n_static = 15;
    spec.n_dynamic = 1;
    spec.chain_length = 3;
    spec.n_cameras = 2;
    spec.n_frames = 3;
    spec.width = 24;
    spec.height = 24;
    spec.n_init_points = 16;
    SyntheticScene a = generate_synthetic(spec, 5);
    SyntheticScene b = generate_synthetic(spec, 5);
    CHECK(scenes_identical(a.ground_truth, b.ground_truth));
    for (std::size_t c = 0; c < a.dataset.frames.size(); ++c)
        for (std::size_t f = 0; f < a.dataset.frames[c].size(); ++f)
            CHECK(a.dataset.frames[c][f].image.data == b.dataset.frames[c][f].image.data);
    SyntheticScene other = generate_synthetic(spec, 6);
    CHECK_FALSE(scenes_identical(a.ground_truth, other.ground_truth));

    // Every stored frame equals the quantized reference render of the ground
    // truth, so self-evaluation hits the 8-bit ceiling and no more.
    for (std::size_t c = 0; c < a.dataset.frames.size(); ++c)
        for (std::size_t f = 0; f < a.dataset.frames[c].size(); ++f) {
            const Frame& fr = a.dataset.frames[c][f];
            Image re = reference_render(a.ground_truth, a.dataset.cameras[c], fr.time,
                                        a.dataset.background, {})
                           .rgb;
            CHECK(quantize_8bit(re).data == fr.image.data);
        }
}

TEST_CASE("synthetic spec file parsing") {
    fs::path dir = temp_dir("hgs_spec");
    std::string path = (dir / "spec.txt").string();
    {
        std::ofstream out(path);
        out << "n_static = 30\nn_dynamic = 2\nwidth = 48\nheight = 48\nn_frames = 10\n";
    }
    SynthSpec spec = SynthSpec::from_file(path);
    CHECK(spec.n_static == 30);
    CHECK(spec.n_dynamic == 2);
    CHECK(spec.width == 48);
    CHECK(spec.n_frames == 10);
    CHECK(spec.n_cameras == 4);  // default untouched
    {
        std::ofstream out(path);
        out << "bogus_key = 1\n";
    }
    CHECK_THROWS_AS(SynthSpec::from_file(path), FormatError);
}
