// SPDX-License-Identifier: Apache-2.0
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hgs/data_io.hpp"
#include "hgs/errors.hpp"
#include "hgs/eval.hpp"
#include "hgs/loss.hpp"
#include "hgs/raster.hpp"
#include "hgs/train.hpp"

namespace py = pybind11;
using namespace hgs;

namespace {

py::array_t<double> image_to_numpy(const Image& img) {
    py::array_t<double> arr({img.height, img.width, 3});
    std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
    return arr;
}

Image numpy_to_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3 || arr.shape(2) != 3)
        throw std::invalid_argument("expected an (h, w, 3) array");
    Image img(int(arr.shape(1)), int(arr.shape(0)));
    std::copy(arr.data(), arr.data() + arr.size(), img.data.begin());
    return img;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "hybrid 3D/4D gaussian splatting core";

    py::register_exception<DegenerateTemporalError>(m, "DegenerateTemporalError");
    py::register_exception<DegenerateRotationError>(m, "DegenerateRotationError");
    py::register_exception<FormatError>(m, "FormatError");
    py::register_exception<IntegrityError>(m, "IntegrityError");
    py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError");
    py::register_exception<NumericAbort>(m, "NumericAbort");

    py::class_<UnitQuat>(m, "UnitQuat")
        .def(py::init<double, double, double, double>(), py::arg("w"), py::arg("x"),
             py::arg("y"), py::arg("z"))
        .def_static("normalized", &UnitQuat::normalized)
        .def_readonly("w", &UnitQuat::w)
        .def_readonly("x", &UnitQuat::x)
        .def_readonly("y", &UnitQuat::y)
        .def_readonly("z", &UnitQuat::z)
        .def("coeffs", &UnitQuat::coeffs);

    py::class_<QuatPair>(m, "QuatPair")
        .def(py::init<>())
        .def_readwrite("left", &QuatPair::left)
        .def_readwrite("right", &QuatPair::right);

    py::class_<SHColor>(m, "SHColor")
        .def(py::init<int>(), py::arg("degree"))
        .def_static("from_rgb_dc", &SHColor::from_rgb_dc)
        .def_readonly("degree", &SHColor::degree)
        .def_readwrite("coeffs", &SHColor::coeffs);

    py::class_<Gaussian3D>(m, "Gaussian3D")
        .def(py::init<>())
        .def_readwrite("mean", &Gaussian3D::mean)
        .def_readwrite("rot", &Gaussian3D::rot)
        .def_readwrite("log_scales", &Gaussian3D::log_scales)
        .def_readwrite("opacity_logit", &Gaussian3D::opacity_logit)
        .def_readwrite("color", &Gaussian3D::color)
        .def("covariance3", &Gaussian3D::covariance3);

    py::class_<Gaussian4D>(m, "Gaussian4D")
        .def(py::init<>())
        .def_readwrite("mean_x", &Gaussian4D::mean_x)
        .def_readwrite("mean_t", &Gaussian4D::mean_t)
        .def_readwrite("rot", &Gaussian4D::rot)
        .def_readwrite("log_scales", &Gaussian4D::log_scales)
        .def_readwrite("opacity_logit", &Gaussian4D::opacity_logit)
        .def_readwrite("color", &Gaussian4D::color)
        .def("rotation4", &Gaussian4D::rotation4)
        .def("covariance4", &Gaussian4D::covariance4)
        .def("temporal_scale", &Gaussian4D::temporal_scale);

    py::class_<HybridScene>(m, "HybridScene")
        .def(py::init<>())
        .def_readwrite("statics", &HybridScene::statics)
        .def_readwrite("dynamics", &HybridScene::dynamics)
        .def_readwrite("tau", &HybridScene::tau)
        .def_readwrite("duration_seconds", &HybridScene::duration_seconds)
        .def_readwrite("sh_degree", &HybridScene::sh_degree)
        .def_readwrite("extent", &HybridScene::extent)
        .def("total", &HybridScene::total);

    py::class_<Camera>(m, "Camera")
        .def(py::init<>())
        .def_static("look_at", &Camera::look_at, py::arg("eye"), py::arg("target"),
                    py::arg("up"), py::arg("focal"), py::arg("width"), py::arg("height"))
        .def_readwrite("fx", &Camera::fx)
        .def_readwrite("fy", &Camera::fy)
        .def_readwrite("cx", &Camera::cx)
        .def_readwrite("cy", &Camera::cy)
        .def_readwrite("rot", &Camera::rot)
        .def_readwrite("trans", &Camera::trans)
        .def_readwrite("width", &Camera::width)
        .def_readwrite("height", &Camera::height)
        .def_readwrite("near", &Camera::near)
        .def_readwrite("far", &Camera::far)
        .def("position", &Camera::position)
        .def("validate", &Camera::validate);

    // math kernels
    m.def("quat_to_rot3", &quat_to_rot3);
    m.def("rot3_to_quat", &rot3_to_quat);
    m.def("left_isoclinic", &left_isoclinic);
    m.def("right_isoclinic", &right_isoclinic);
    m.def("rot4_from_pair", &rot4_from_pair);
    m.def("pair_from_rot4", &pair_from_rot4);
    m.def("build_cov3", &build_cov3);
    m.def("build_cov4", &build_cov4);
    m.def(
        "condition_at_time",
        [](const Vec4& mean4, const Mat4& cov4, double t) {
            TemporalSlice s = condition_at_time(mean4, cov4, t);
            return py::make_tuple(s.mean3, s.cov3, s.temporal_weight);
        },
        py::arg("mean4"), py::arg("cov4"), py::arg("t"),
        "returns (mean3, cov3, temporal_weight)");

    // scene ops
    m.def("is_static", &is_static);
    m.def("convert_4d_to_3d", &convert_4d_to_3d);
    m.def("sweep_convert", [](HybridScene& scene) {
        ConversionReport r = sweep_convert(scene);
        return py::make_tuple(r.count, r.max_leakage, r.mean_leakage);
    });

    // rendering
    auto render_opts = [](int num_threads, double weight_cutoff) {
        RasterOpts opts;
        opts.num_threads = num_threads;
        opts.weight_cutoff = weight_cutoff;
        return opts;
    };
    m.def(
        "rasterize",
        [render_opts](const HybridScene& scene, const Camera& cam, double t,
                      const Vec3& background, int num_threads, double weight_cutoff) {
            return image_to_numpy(
                rasterize(scene, cam, t, background, render_opts(num_threads, weight_cutoff)).rgb);
        },
        py::arg("scene"), py::arg("camera"), py::arg("t"), py::arg("background") = Vec3::Zero(),
        py::arg("num_threads") = 1, py::arg("weight_cutoff") = kDefaultWeightCutoff);
    m.def(
        "reference_render",
        [render_opts](const HybridScene& scene, const Camera& cam, double t,
                      const Vec3& background, double weight_cutoff) {
            return image_to_numpy(
                reference_render(scene, cam, t, background, render_opts(1, weight_cutoff)).rgb);
        },
        py::arg("scene"), py::arg("camera"), py::arg("t"), py::arg("background") = Vec3::Zero(),
        py::arg("weight_cutoff") = kDefaultWeightCutoff);
    m.def("density_map",
          [](const HybridScene& scene, const Camera& cam, double t, bool dynamics_only) {
              std::vector<uint32_t> counts = density_map(scene, cam, t, dynamics_only);
              py::array_t<uint32_t> arr({cam.height, cam.width});
              std::copy(counts.begin(), counts.end(), arr.mutable_data());
              return arr;
          },
          py::arg("scene"), py::arg("camera"), py::arg("t"), py::arg("dynamics_only") = false);

    // metrics
    m.def("psnr", [](const py::array_t<double>& a, const py::array_t<double>& b) {
        return psnr(numpy_to_image(a), numpy_to_image(b));
    });
    m.def("ssim", [](const py::array_t<double>& a, const py::array_t<double>& b) {
        return ssim(numpy_to_image(a), numpy_to_image(b));
    });

    // data + training
    py::class_<SynthSpec>(m, "SynthSpec")
        .def(py::init<>())
        .def_readwrite("n_static", &SynthSpec::n_static)
        .def_readwrite("n_dynamic", &SynthSpec::n_dynamic)
        .def_readwrite("chain_length", &SynthSpec::chain_length)
        .def_readwrite("n_cameras", &SynthSpec::n_cameras)
        .def_readwrite("n_frames", &SynthSpec::n_frames)
        .def_readwrite("width", &SynthSpec::width)
        .def_readwrite("height", &SynthSpec::height)
        .def_readwrite("n_init_points", &SynthSpec::n_init_points);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &TrainConfig::iterations)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("warmup_iters", &TrainConfig::warmup_iters)
        .def_readwrite("densify_interval", &TrainConfig::densify_interval)
        .def_readwrite("densify_stop_iter", &TrainConfig::densify_stop_iter)
        .def_readwrite("tau", &TrainConfig::tau)
        .def_readwrite("conversion_enabled", &TrainConfig::conversion_enabled)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("sh_degree", &TrainConfig::sh_degree)
        .def_readwrite("opacity_reset_enabled", &TrainConfig::opacity_reset_enabled)
        .def_readwrite("probe_interval", &TrainConfig::probe_interval);

    m.def("generate_synthetic_dataset",
          [](const SynthSpec& spec, uint64_t seed, const std::string& out_dir) {
              save_synthetic(generate_synthetic(spec, seed), out_dir);
          },
          py::arg("spec"), py::arg("seed"), py::arg("out_dir"));
    m.def("save_checkpoint",
          [](const HybridScene& scene, const std::string& path) {
              save_checkpoint(scene, nullptr, path);
          },
          py::arg("scene"), py::arg("path"));
    m.def("load_checkpoint",
          [](const std::string& path) { return load_checkpoint(path).scene; },
          py::arg("path"));
    m.def(
        "train",
        [](const std::string& data_dir, int held_out, const TrainConfig& cfg) {
            auto [split, held] = load_dataset(data_dir, held_out);
            TrainResult result = train(split, cfg);
            double held_psnr = -1.0;
            if (!held.cameras.empty()) {
                RasterOpts opts;
                opts.weight_cutoff = cfg.weight_cutoff;
                held_psnr = evaluate_views(result.scene, held, opts).mean_psnr;
            }
            return py::make_tuple(result.scene, held_psnr);
        },
        py::arg("data_dir"), py::arg("held_out") = -1, py::arg("config") = TrainConfig{},
        "returns (scene, held_out_psnr)");
}
