// SPDX-License-Identifier: Apache-2.0
#include "hgs/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "hgs/config.hpp"
#include "hgs/errors.hpp"
#include "hgs/raster.hpp"

namespace fs = std::filesystem;

namespace hgs {

namespace {

std::string cam_dir(int id) {
    std::ostringstream os;
    os << "cam" << std::setw(2) << std::setfill('0') << id;
    return os.str();
}

std::string frame_name(int j) {
    std::ostringstream os;
    os << "frame_" << std::setw(5) << std::setfill('0') << j << ".ppm";
    return os.str();
}

double frame_time(int j, int n_frames) {
    return n_frames > 1 ? double(j) / double(n_frames - 1) : 0.0;
}

}  // namespace

// ---------------------------------------------------------------- datasets

void save_dataset(const MultiViewDataset& ds, const std::string& root) {
    fs::create_directories(root);
    {
        std::ofstream out(root + "/cameras.txt");
        if (!out) throw FormatError("save_dataset: cannot open " + root + "/cameras.txt");
        out << std::setprecision(17);
        for (std::size_t i = 0; i < ds.cameras.size(); ++i) {
            const Camera& c = ds.cameras[i];
            out << ds.camera_ids[i] << ' ' << c.fx << ' ' << c.fy << ' ' << c.cx << ' '
                << c.cy << ' ' << c.width << ' ' << c.height << ' ' << c.near << ' ' << c.far;
            for (int r = 0; r < 3; ++r)
                for (int k = 0; k < 3; ++k) out << ' ' << c.rot(r, k);
            for (int r = 0; r < 3; ++r) out << ' ' << c.trans[r];
            out << '\n';
        }
    }
    {
        std::ofstream out(root + "/meta.txt");
        out << std::setprecision(17);
        out << "duration_seconds = " << ds.duration_seconds << '\n';
        out << "background_r = " << ds.background[0] << '\n';
        out << "background_g = " << ds.background[1] << '\n';
        out << "background_b = " << ds.background[2] << '\n';
    }
    for (std::size_t i = 0; i < ds.cameras.size(); ++i) {
        std::string dir = root + "/" + cam_dir(ds.camera_ids[i]);
        fs::create_directories(dir);
        for (std::size_t j = 0; j < ds.frames[i].size(); ++j)
            write_ppm(ds.frames[i][j].image, dir + "/" + frame_name(int(j)));
    }
    if (!ds.init_points.empty()) save_points(ds.init_points, root + "/points.txt");
}

std::pair<MultiViewDataset, MultiViewDataset> load_dataset(const std::string& root,
                                                           int held_out_camera) {
    std::ifstream in(root + "/cameras.txt");
    if (!in) throw FormatError("load_dataset: cannot open " + root + "/cameras.txt");

    MultiViewDataset all;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Camera c;
        int id;
        ls >> id >> c.fx >> c.fy >> c.cx >> c.cy >> c.width >> c.height >> c.near >> c.far;
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k) ls >> c.rot(r, k);
        for (int r = 0; r < 3; ++r) ls >> c.trans[r];
        if (!ls)
            throw FormatError(root + "/cameras.txt:" + std::to_string(lineno) +
                              ": expected 21 numbers after the camera id");
        try {
            c.validate();
        } catch (const std::invalid_argument& e) {
            throw FormatError(root + "/cameras.txt:" + std::to_string(lineno) + ": " + e.what());
        }
        all.cameras.push_back(c);
        all.camera_ids.push_back(id);
    }
    if (all.cameras.empty()) throw FormatError(root + "/cameras.txt: no cameras");

    if (fs::exists(root + "/meta.txt")) {
        KeyValueFile kv(root + "/meta.txt");
        kv.get("duration_seconds", all.duration_seconds);
        kv.get("background_r", all.background[0]);
        kv.get("background_g", all.background[1]);
        kv.get("background_b", all.background[2]);
        kv.finish();
    }
    if (fs::exists(root + "/points.txt")) all.init_points = load_points(root + "/points.txt");

    all.frames.resize(all.cameras.size());
    std::size_t expected = SIZE_MAX;
    for (std::size_t i = 0; i < all.cameras.size(); ++i) {
        std::string dir = root + "/" + cam_dir(all.camera_ids[i]);
        for (int j = 0;; ++j) {
            std::string path = dir + "/" + frame_name(j);
            if (!fs::exists(path)) break;
            Image img = read_ppm(path);
            if (img.width != all.cameras[i].width || img.height != all.cameras[i].height)
                throw FormatError(path + ": frame size disagrees with cameras.txt");
            all.frames[i].push_back(Frame{std::move(img), 0.0});
        }
        if (all.frames[i].empty()) throw FormatError(dir + ": no frames found");
        if (expected == SIZE_MAX) expected = all.frames[i].size();
        if (all.frames[i].size() != expected)
            throw FormatError(dir + ": frame count differs between cameras");
        for (std::size_t j = 0; j < all.frames[i].size(); ++j)
            all.frames[i][j].time = frame_time(int(j), int(expected));
    }

    MultiViewDataset train, held;
    train.duration_seconds = held.duration_seconds = all.duration_seconds;
    train.background = held.background = all.background;
    train.init_points = all.init_points;
    bool found = false;
    for (std::size_t i = 0; i < all.cameras.size(); ++i) {
        bool is_held = all.camera_ids[i] == held_out_camera;
        MultiViewDataset& dst = is_held ? held : train;
        found |= is_held;
        dst.cameras.push_back(all.cameras[i]);
        dst.camera_ids.push_back(all.camera_ids[i]);
        dst.frames.push_back(std::move(all.frames[i]));
    }
    if (held_out_camera >= 0 && !found)
        throw FormatError("load_dataset: held-out camera id " +
                          std::to_string(held_out_camera) + " not in dataset");
    if (train.cameras.empty())
        throw FormatError("load_dataset: holding out the only camera leaves nothing to train on");
    return {std::move(train), std::move(held)};
}

// ------------------------------------------------------------------ points

InitPoints load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("load_points: cannot open " + path);
    InitPoints pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        InitPoint p;
        ls >> p.position[0] >> p.position[1] >> p.position[2] >> p.rgb[0] >> p.rgb[1] >> p.rgb[2];
        if (!ls) throw FormatError(path + ":" + std::to_string(lineno) + ": expected x y z r g b");
        pts.push_back(p);
    }
    return pts;
}

void save_points(const InitPoints& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("save_points: cannot open " + path);
    out << std::setprecision(17);
    for (const InitPoint& p : points)
        out << p.position[0] << ' ' << p.position[1] << ' ' << p.position[2] << ' '
            << p.rgb[0] << ' ' << p.rgb[1] << ' ' << p.rgb[2] << '\n';
}

// -------------------------------------------------------------------- init

HybridScene init_scene(const InitPoints& points, const InitConfig& cfg) {
    if (points.size() < 4)
        throw std::invalid_argument("init_scene: need at least 4 points");

    Vec3 centroid = Vec3::Zero();
    for (const InitPoint& p : points) centroid += p.position;
    centroid /= double(points.size());
    double extent = 1e-6;
    for (const InitPoint& p : points)
        extent = std::max(extent, (p.position - centroid).norm());

    HybridScene scene;
    scene.tau = cfg.tau;
    scene.duration_seconds = cfg.duration_seconds;
    scene.sh_degree = cfg.sh_degree;
    scene.extent = extent;
    scene.dynamics.reserve(points.size());

    const double n = double(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        // Mean distance to the 3 nearest neighbors sets the spatial footprint.
        double d1 = 1e30, d2 = 1e30, d3 = 1e30;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            double d = (points[j].position - points[i].position).squaredNorm();
            if (d < d1) { d3 = d2; d2 = d1; d1 = d; }
            else if (d < d2) { d3 = d2; d2 = d; }
            else if (d < d3) { d3 = d; }
        }
        double mean_nn = (std::sqrt(d1) + std::sqrt(d2) + std::sqrt(d3)) / 3.0;
        double s = std::log(std::max(mean_nn, 1e-4));

        Gaussian4D g;
        g.mean_x = points[i].position;
        g.mean_t = (double(i) + 0.5) / n;  // spread over the sequence
        g.log_scales = Vec4(s, s, s, std::log(cfg.init_temporal_scale));
        g.opacity_logit = logit(cfg.init_opacity);
        g.color = SHColor::from_rgb_dc(points[i].rgb, cfg.sh_degree);
        scene.dynamics.push_back(std::move(g));
    }
    return scene;
}

// --------------------------------------------------------------- synthetic

SynthSpec SynthSpec::from_file(const std::string& path) {
    KeyValueFile kv(path);
    SynthSpec s;
    kv.get("n_static", s.n_static);
    kv.get("n_dynamic", s.n_dynamic);
    kv.get("chain_length", s.chain_length);
    kv.get("n_cameras", s.n_cameras);
    kv.get("n_frames", s.n_frames);
    kv.get("width", s.width);
    kv.get("height", s.height);
    kv.get("ring_radius", s.ring_radius);
    kv.get("duration_seconds", s.duration_seconds);
    kv.get("focal", s.focal);
    kv.get("n_init_points", s.n_init_points);
    kv.finish();
    return s;
}

namespace {

// A moving blob's position and velocity in normalized time.
struct BlobPath {
    Vec3 center;
    double radius, phase, bob;

    Vec3 at(double t) const {
        double a = 2.0 * M_PI * t + phase;
        return center + Vec3(radius * std::cos(a), bob * std::sin(2.0 * a),
                             radius * std::sin(a));
    }
    Vec3 velocity(double t) const {
        double a = 2.0 * M_PI * t + phase;
        double w = 2.0 * M_PI;
        return Vec3(-radius * w * std::sin(a), 2.0 * w * bob * std::cos(2.0 * a),
                    radius * w * std::cos(a));
    }
};

// Builds a 4D Gaussian whose conditional slice has spatial covariance
// spatial_cov, whose mean drifts with `velocity`, and whose temporal
// footprint is sigma_t around t0.
Gaussian4D make_moving_gaussian(const Vec3& pos, double t0, const Vec3& velocity,
                                const Mat3& spatial_cov, double sigma_t) {
    Mat4 cov4;
    double vt = sigma_t * sigma_t;
    cov4.topLeftCorner<3, 3>() = spatial_cov + vt * velocity * velocity.transpose();
    cov4.topRightCorner<3, 1>() = vt * velocity;
    cov4.bottomLeftCorner<1, 3>() = vt * velocity.transpose();
    cov4(3, 3) = vt;

    Eigen::SelfAdjointEigenSolver<Mat4> es(cov4);
    Mat4 q = es.eigenvectors();
    if (q.determinant() < 0.0) q.col(0) = -q.col(0);
    Vec4 ev = es.eigenvalues().cwiseMax(1e-12);

    Gaussian4D g;
    g.mean_x = pos;
    g.mean_t = t0;
    g.rot = pair_from_rot4(q);
    g.log_scales = 0.5 * ev.array().log();
    return g;
}

}  // namespace

SyntheticScene generate_synthetic(const SynthSpec& spec, uint64_t seed) {
    if (spec.n_frames < 2) throw std::invalid_argument("generate_synthetic: n_frames must be >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);

    SyntheticScene out;
    HybridScene& gt = out.ground_truth;
    gt.tau = 0.5;
    gt.duration_seconds = spec.duration_seconds;
    gt.sh_degree = 1;

    // Static layer: a flat floor grid plus scattered blobs above it.
    int n_floor = (spec.n_static * 2) / 3;
    int grid = std::max(1, int(std::lround(std::sqrt(double(std::max(n_floor, 1))))));
    n_floor = grid * grid;
    int n_scatter = std::max(0, spec.n_static - n_floor);
    for (int iy = 0; iy < grid; ++iy) {
        for (int ix = 0; ix < grid; ++ix) {
            Gaussian3D g;
            double fx = grid > 1 ? double(ix) / (grid - 1) : 0.5;
            double fz = grid > 1 ? double(iy) / (grid - 1) : 0.5;
            g.mean = Vec3(-2.0 + 4.0 * fx, 1.2, -2.0 + 4.0 * fz);
            double tile = 4.4 / double(grid);
            g.log_scales = Vec3(std::log(0.6 * tile), std::log(0.05), std::log(0.6 * tile));
            g.opacity_logit = logit(0.9);
            Vec3 rgb = (ix + iy) % 2 == 0 ? Vec3(0.62, 0.60, 0.66) : Vec3(0.28, 0.36, 0.30);
            g.color = SHColor::from_rgb_dc(rgb, gt.sh_degree);
            gt.statics.push_back(std::move(g));
        }
    }
    for (int i = 0; i < n_scatter; ++i) {
        Gaussian3D g;
        g.mean = Vec3(2.2 * (uni(rng) - 0.5) * 2.0, -0.6 + 1.4 * uni(rng),
                      2.2 * (uni(rng) - 0.5) * 2.0);
        g.rot = UnitQuat::normalized(nd(rng), nd(rng), nd(rng), nd(rng));
        g.log_scales = Vec3(std::log(0.10 + 0.12 * uni(rng)), std::log(0.10 + 0.12 * uni(rng)),
                            std::log(0.10 + 0.12 * uni(rng)));
        g.opacity_logit = logit(0.85);
        g.color = SHColor::from_rgb_dc(
            Vec3(0.2 + 0.7 * uni(rng), 0.2 + 0.7 * uni(rng), 0.2 + 0.7 * uni(rng)),
            gt.sh_degree);
        gt.statics.push_back(std::move(g));
    }

    // Dynamic layer: each blob is a chain of 4D Gaussians along its orbit.
    const Vec3 palette[3] = {Vec3(0.95, 0.30, 0.22), Vec3(0.25, 0.75, 0.95),
                             Vec3(0.95, 0.85, 0.25)};
    std::vector<BlobPath> paths;
    for (int b = 0; b < spec.n_dynamic; ++b) {
        BlobPath path;
        path.center = Vec3(0.8 * (uni(rng) - 0.5), -0.2 + 0.5 * (uni(rng) - 0.5),
                           0.8 * (uni(rng) - 0.5));
        path.radius = 0.6 + 0.5 * uni(rng);
        path.phase = 2.0 * M_PI * uni(rng);
        path.bob = 0.15 + 0.1 * uni(rng);
        paths.push_back(path);

        double sigma_t = 0.7 / double(spec.chain_length);
        Mat3 spatial = Mat3::Identity() * (0.13 * 0.13);
        for (int k = 0; k < spec.chain_length; ++k) {
            double t0 = (k + 0.5) / double(spec.chain_length);
            Gaussian4D g = make_moving_gaussian(path.at(t0), t0, path.velocity(t0),
                                                spatial, sigma_t);
            g.opacity_logit = logit(0.9);
            g.color = SHColor::from_rgb_dc(palette[b % 3], gt.sh_degree);
            gt.dynamics.push_back(std::move(g));
        }
    }

    // Extent from all geometry.
    {
        Vec3 centroid = Vec3::Zero();
        std::vector<Vec3> pos;
        for (const auto& g : gt.statics) pos.push_back(g.mean);
        for (const auto& p : paths)
            for (int j = 0; j < 16; ++j) pos.push_back(p.at(j / 15.0));
        for (const Vec3& p : pos) centroid += p;
        centroid /= double(pos.size());
        gt.extent = 1e-6;
        for (const Vec3& p : pos) gt.extent = std::max(gt.extent, (p - centroid).norm());
    }

    // Forward-facing rig: cameras spread over a ~17 degree arc, slightly
    // above the scene, all converging on its middle. Neighboring views
    // bracket each other closely enough for held-out-view evaluation.
    MultiViewDataset& ds = out.dataset;
    ds.duration_seconds = spec.duration_seconds;
    ds.background = Vec3::Zero();
    for (int i = 0; i < spec.n_cameras; ++i) {
        double frac = spec.n_cameras > 1 ? double(i) / (spec.n_cameras - 1) - 0.5 : 0.0;
        double a = 0.3 * frac + 0.31;
        Vec3 eye(spec.ring_radius * std::cos(a), -0.9, spec.ring_radius * std::sin(a));
        Camera cam = Camera::look_at(eye, Vec3(0.0, 0.2, 0.0), Vec3(0, -1, 0), spec.focal,
                                     spec.width, spec.height);
        cam.validate();
        ds.cameras.push_back(cam);
        ds.camera_ids.push_back(i);
    }

    RasterOpts ropts;
    ds.frames.resize(ds.cameras.size());
    for (std::size_t ci = 0; ci < ds.cameras.size(); ++ci) {
        for (int j = 0; j < spec.n_frames; ++j) {
            double t = frame_time(j, spec.n_frames);
            RenderOutput ro = reference_render(gt, ds.cameras[ci], t, ds.background, ropts);
            // Match what a PPM save/load would deliver, pixel for pixel.
            ds.frames[ci].push_back(Frame{quantize_8bit(ro.rgb), t});
        }
    }

    // Initialization points: samples drawn from the ground-truth Gaussians.
    std::uniform_int_distribution<std::size_t> pick(0, gt.total() - 1);
    for (int i = 0; i < spec.n_init_points; ++i) {
        std::size_t idx = pick(rng);
        InitPoint p;
        Vec3 n3(nd(rng), nd(rng), nd(rng));
        if (idx < gt.statics.size()) {
            const Gaussian3D& g = gt.statics[idx];
            Mat3 m = quat_to_rot3(g.rot) * g.log_scales.array().exp().matrix().asDiagonal();
            p.position = g.mean + m * n3;
            p.rgb = (0.28209479177387814 * g.color.coeffs[0].array() + 0.5)
                        .cwiseMax(0.0).cwiseMin(1.0);
        } else {
            const Gaussian4D& g = gt.dynamics[idx - gt.statics.size()];
            Mat4 m4 = g.rotation4() * g.log_scales.array().exp().matrix().asDiagonal();
            Vec4 n4(n3[0], n3[1], n3[2], nd(rng));
            p.position = g.mean_x + (m4 * n4).head<3>();
            p.rgb = (0.28209479177387814 * g.color.coeffs[0].array() + 0.5)
                        .cwiseMax(0.0).cwiseMin(1.0);
        }
        out.init_points.push_back(p);
    }
    out.dataset.init_points = out.init_points;
    return out;
}

void save_synthetic(const SyntheticScene& synth, const std::string& root) {
    save_dataset(synth.dataset, root);
    save_points(synth.init_points, root + "/points.txt");
    save_checkpoint(synth.ground_truth, nullptr, root + "/ground_truth.hgsc");
}

// -------------------------------------------------------------- checkpoint

namespace {

constexpr uint32_t kCheckpointVersion = 1;

struct ByteWriter {
    std::string buf;

    void bytes(const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); }
    void u32(uint32_t v) { bytes(&v, 4); }
    void u64(uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void f64v(const std::vector<double>& v) {
        u64(v.size());
        bytes(v.data(), v.size() * 8);
    }
    void u32v(const std::vector<uint32_t>& v) {
        u64(v.size());
        bytes(v.data(), v.size() * 4);
    }
};

struct ByteReader {
    const char* p;
    std::size_t n, off = 0;

    void bytes(void* dst, std::size_t len) {
        if (off + len > n) throw FormatError("checkpoint: truncated section payload");
        std::memcpy(dst, p + off, len);
        off += len;
    }
    uint32_t u32() { uint32_t v; bytes(&v, 4); return v; }
    uint64_t u64() { uint64_t v; bytes(&v, 8); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    std::vector<double> f64v() {
        uint64_t len = u64();
        if (len > n / 8 + 1) throw FormatError("checkpoint: implausible array length");
        std::vector<double> v(len);
        bytes(v.data(), len * 8);
        return v;
    }
    std::vector<uint32_t> u32v() {
        uint64_t len = u64();
        if (len > n / 4 + 1) throw FormatError("checkpoint: implausible array length");
        std::vector<uint32_t> v(len);
        bytes(v.data(), len * 4);
        return v;
    }
    bool done() const { return off == n; }
};

void put_quat(ByteWriter& w, const UnitQuat& q) {
    w.f64(q.w); w.f64(q.x); w.f64(q.y); w.f64(q.z);
}

// Validates without renormalizing so the roundtrip is bit-exact; a sign flip
// to the canonical hemisphere is exact in floating point.
UnitQuat get_quat(ByteReader& r) {
    double w = r.f64(), x = r.f64(), y = r.f64(), z = r.f64();
    double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(std::abs(n - 1.0) <= 1e-6)) throw FormatError("checkpoint: non-unit quaternion");
    bool flip =
        w < 0.0 || (w == 0.0 && (x < 0.0 || (x == 0.0 && (y < 0.0 || (y == 0.0 && z < 0.0)))));
    if (flip) { w = -w; x = -x; y = -y; z = -z; }
    UnitQuat q;
    q.w = w; q.x = x; q.y = y; q.z = z;
    return q;
}

void put_sh(ByteWriter& w, const SHColor& c) {
    w.u32(uint32_t(c.degree));
    for (const Vec3& v : c.coeffs) { w.f64(v[0]); w.f64(v[1]); w.f64(v[2]); }
}

SHColor get_sh(ByteReader& r) {
    uint32_t deg = r.u32();
    if (deg > uint32_t(kMaxShDegree)) throw FormatError("checkpoint: bad SH degree");
    SHColor c{int(deg)};
    for (Vec3& v : c.coeffs) { v[0] = r.f64(); v[1] = r.f64(); v[2] = r.f64(); }
    return c;
}

std::string encode_scene(const HybridScene& scene) {
    ByteWriter w;
    w.u32(uint32_t(scene.sh_degree));
    w.f64(scene.tau);
    w.f64(scene.duration_seconds);
    w.f64(scene.extent);
    w.u64(scene.statics.size());
    w.u64(scene.dynamics.size());
    for (const Gaussian3D& g : scene.statics) {
        for (int k = 0; k < 3; ++k) w.f64(g.mean[k]);
        put_quat(w, g.rot);
        for (int k = 0; k < 3; ++k) w.f64(g.log_scales[k]);
        w.f64(g.opacity_logit);
        put_sh(w, g.color);
    }
    for (const Gaussian4D& g : scene.dynamics) {
        for (int k = 0; k < 3; ++k) w.f64(g.mean_x[k]);
        w.f64(g.mean_t);
        put_quat(w, g.rot.left);
        put_quat(w, g.rot.right);
        for (int k = 0; k < 4; ++k) w.f64(g.log_scales[k]);
        w.f64(g.opacity_logit);
        put_sh(w, g.color);
    }
    return std::move(w.buf);
}

HybridScene decode_scene(ByteReader& r) {
    HybridScene scene;
    scene.sh_degree = int(r.u32());
    if (scene.sh_degree < 0 || scene.sh_degree > kMaxShDegree)
        throw FormatError("checkpoint: bad scene SH degree");
    scene.tau = r.f64();
    scene.duration_seconds = r.f64();
    scene.extent = r.f64();
    uint64_t n3 = r.u64(), n4 = r.u64();
    scene.statics.resize(n3);
    scene.dynamics.resize(n4);
    for (Gaussian3D& g : scene.statics) {
        for (int k = 0; k < 3; ++k) g.mean[k] = r.f64();
        g.rot = get_quat(r);
        for (int k = 0; k < 3; ++k) g.log_scales[k] = r.f64();
        g.opacity_logit = r.f64();
        g.color = get_sh(r);
    }
    for (Gaussian4D& g : scene.dynamics) {
        for (int k = 0; k < 3; ++k) g.mean_x[k] = r.f64();
        g.mean_t = r.f64();
        g.rot.left = get_quat(r);
        g.rot.right = get_quat(r);
        for (int k = 0; k < 4; ++k) g.log_scales[k] = r.f64();
        g.opacity_logit = r.f64();
        g.color = get_sh(r);
    }
    if (!r.done()) throw FormatError("checkpoint: trailing bytes in scene section");
    return scene;
}

void put_buf(ByteWriter& w, const AdamBuf& b) {
    w.f64v(b.m);
    w.f64v(b.v);
}

AdamBuf get_buf(ByteReader& r) {
    AdamBuf b;
    b.m = r.f64v();
    b.v = r.f64v();
    if (b.m.size() != b.v.size()) throw FormatError("checkpoint: moment size mismatch");
    return b;
}

std::string encode_state(const GradAccum& s) {
    ByteWriter w;
    w.u64(s.step);
    w.u64(s.skipped_nonfinite);
    put_buf(w, s.statics.mean);
    put_buf(w, s.statics.quat);
    put_buf(w, s.statics.scales);
    put_buf(w, s.statics.opacity);
    put_buf(w, s.statics.sh);
    put_buf(w, s.dynamics.mean_x);
    put_buf(w, s.dynamics.mean_t);
    put_buf(w, s.dynamics.quat_left);
    put_buf(w, s.dynamics.quat_right);
    put_buf(w, s.dynamics.scales);
    put_buf(w, s.dynamics.opacity);
    put_buf(w, s.dynamics.sh);
    w.f64v(s.grad_norm3);
    w.f64v(s.grad_norm4);
    w.u32v(s.count3);
    w.u32v(s.count4);
    return std::move(w.buf);
}

GradAccum decode_state(ByteReader& r) {
    GradAccum s;
    s.step = r.u64();
    s.skipped_nonfinite = r.u64();
    s.statics.mean = get_buf(r);
    s.statics.quat = get_buf(r);
    s.statics.scales = get_buf(r);
    s.statics.opacity = get_buf(r);
    s.statics.sh = get_buf(r);
    s.dynamics.mean_x = get_buf(r);
    s.dynamics.mean_t = get_buf(r);
    s.dynamics.quat_left = get_buf(r);
    s.dynamics.quat_right = get_buf(r);
    s.dynamics.scales = get_buf(r);
    s.dynamics.opacity = get_buf(r);
    s.dynamics.sh = get_buf(r);
    s.grad_norm3 = r.f64v();
    s.grad_norm4 = r.f64v();
    s.count3 = r.u32v();
    s.count4 = r.u32v();
    if (!r.done()) throw FormatError("checkpoint: trailing bytes in state section");
    return s;
}

void write_section(std::ofstream& out, const char tag[4], const std::string& payload) {
    out.write(tag, 4);
    uint64_t len = payload.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    uint32_t crc = uint32_t(
        crc32(0, reinterpret_cast<const Bytef*>(payload.data()), uInt(payload.size())));
    out.write(reinterpret_cast<const char*>(&crc), 4);
    out.write(payload.data(), std::streamsize(payload.size()));
}

}  // namespace

void save_checkpoint(const HybridScene& scene, const GradAccum* state,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("save_checkpoint: cannot open " + path);
    out.write("HGSC", 4);
    out.write(reinterpret_cast<const char*>(&kCheckpointVersion), 4);
    write_section(out, "SCEN", encode_scene(scene));
    if (state) write_section(out, "OPTS", encode_state(*state));
    if (!out) throw FormatError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("load_checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "HGSC", 4) != 0)
        throw FormatError("load_checkpoint: bad magic in " + path);
    uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    if (!in) throw FormatError("load_checkpoint: truncated header in " + path);
    if (version != kCheckpointVersion)
        throw UnsupportedVersionError("load_checkpoint: unsupported version " +
                                      std::to_string(version));

    Checkpoint ckpt;
    bool have_scene = false;
    while (true) {
        char tag[4];
        in.read(tag, 4);
        if (in.eof() && in.gcount() == 0) break;
        uint64_t len = 0;
        uint32_t crc = 0;
        in.read(reinterpret_cast<char*>(&len), 8);
        in.read(reinterpret_cast<char*>(&crc), 4);
        if (!in) throw FormatError("load_checkpoint: truncated section header in " + path);
        std::string payload(len, '\0');
        in.read(payload.data(), std::streamsize(len));
        if (std::size_t(in.gcount()) != len)
            throw FormatError("load_checkpoint: truncated section payload in " + path);
        uint32_t actual = uint32_t(
            crc32(0, reinterpret_cast<const Bytef*>(payload.data()), uInt(payload.size())));
        if (actual != crc)
            throw IntegrityError("load_checkpoint: checksum mismatch in " + path);
        ByteReader r{payload.data(), payload.size()};
        if (std::memcmp(tag, "SCEN", 4) == 0) {
            ckpt.scene = decode_scene(r);
            have_scene = true;
        } else if (std::memcmp(tag, "OPTS", 4) == 0) {
            ckpt.state = decode_state(r);
        }
        // Unknown tags with valid checksums are skipped.
    }
    if (!have_scene) throw FormatError("load_checkpoint: no scene section in " + path);
    if (ckpt.state) {
        std::size_t sh_dim = 3 * std::size_t(sh_coeff_count(ckpt.scene.sh_degree));
        if (ckpt.state->statics.mean.rows(3) != ckpt.scene.statics.size() ||
            ckpt.state->dynamics.mean_x.rows(3) != ckpt.scene.dynamics.size() ||
            (sh_dim > 0 && ckpt.state->statics.sh.rows(sh_dim) != ckpt.scene.statics.size()))
            throw FormatError("load_checkpoint: optimizer state disagrees with scene in " + path);
    }
    return ckpt;
}

}  // namespace hgs
