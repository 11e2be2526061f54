// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hgs/data_io.hpp"
#include "hgs/errors.hpp"
#include "hgs/eval.hpp"
#include "hgs/raster.hpp"
#include "hgs/train.hpp"

using namespace hgs;

namespace {

const Camera& find_camera(const MultiViewDataset& ds, int id) {
    for (std::size_t i = 0; i < ds.cameras.size(); ++i)
        if (ds.camera_ids[i] == id) return ds.cameras[i];
    throw FormatError("camera id " + std::to_string(id) + " not in dataset");
}

int run(int argc, char** argv) {
    CLI::App app{"hybrid 3D/4D gaussian splatting"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "optimize a scene from a dataset");
    std::string t_config, t_data, t_out, t_log;
    int t_held = -1;
    train_cmd->add_option("--config", t_config, "key=value training config");
    train_cmd->add_option("--data", t_data, "dataset directory")->required();
    train_cmd->add_option("--out", t_out, "output checkpoint path")->required();
    train_cmd->add_option("--held-out", t_held, "camera id excluded from training");
    train_cmd->add_option("--log", t_log, "per-iteration CSV log path");

    // render
    auto* render_cmd = app.add_subcommand("render", "render one view at one time");
    std::string r_ckpt, r_data, r_out;
    int r_camera = 0;
    double r_time = 0.0;
    bool r_float_dump = false;
    render_cmd->add_option("--ckpt", r_ckpt)->required();
    render_cmd->add_option("--data", r_data, "dataset directory (camera definitions)")->required();
    render_cmd->add_option("--camera", r_camera)->required();
    render_cmd->add_option("--time", r_time, "normalized time in [0,1]")->required();
    render_cmd->add_option("--out", r_out, "output image (.ppm)")->required();
    render_cmd->add_flag("--float-dump", r_float_dump, "write raw float planes instead of PPM");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "metrics on a held-out camera");
    std::string e_ckpt, e_data, e_out;
    int e_held = -1;
    eval_cmd->add_option("--ckpt", e_ckpt)->required();
    eval_cmd->add_option("--data", e_data)->required();
    eval_cmd->add_option("--held-out", e_held)->required();
    eval_cmd->add_option("--out", e_out, "CSV path (default stdout)");

    // classify-stats
    auto* cls_cmd = app.add_subcommand("classify-stats", "temporal-scale histogram");
    std::string c_ckpt, c_out;
    int c_bins = 40;
    double c_max = 1.0;
    cls_cmd->add_option("--ckpt", c_ckpt)->required();
    cls_cmd->add_option("--bins", c_bins);
    cls_cmd->add_option("--max", c_max, "upper edge; larger scales land in the last bin");
    cls_cmd->add_option("--out", c_out, "CSV path (default stdout)");

    // density-map
    auto* den_cmd = app.add_subcommand("density-map", "per-pixel projected Gaussian counts");
    std::string d_ckpt, d_data, d_out;
    int d_camera = 0;
    double d_time = 0.0;
    bool d_dynamics_only = false;
    den_cmd->add_option("--ckpt", d_ckpt)->required();
    den_cmd->add_option("--data", d_data)->required();
    den_cmd->add_option("--camera", d_camera)->required();
    den_cmd->add_option("--time", d_time)->required();
    den_cmd->add_flag("--dynamics-only", d_dynamics_only);
    den_cmd->add_option("--out", d_out, "output path (.pgm or .csv)")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic benchmark");
    std::string s_spec, s_out;
    uint64_t s_seed = 0;
    synth_cmd->add_option("--spec", s_spec, "key=value spec (defaults when omitted)");
    synth_cmd->add_option("--seed", s_seed);
    synth_cmd->add_option("--out", s_out, "output dataset directory")->required();

    // ablate
    auto* abl_cmd = app.add_subcommand("ablate", "train and score a matrix of variants");
    std::string a_matrix, a_data, a_out, a_config;
    int a_held = 0;
    abl_cmd->add_option("--matrix", a_matrix)->required();
    abl_cmd->add_option("--data", a_data)->required();
    abl_cmd->add_option("--held-out", a_held)->required();
    abl_cmd->add_option("--config", a_config, "base training config");
    abl_cmd->add_option("--out", a_out, "CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    if (*train_cmd) {
        TrainConfig cfg = t_config.empty() ? TrainConfig{} : TrainConfig::from_file(t_config);
        auto [split, held] = load_dataset(t_data, t_held);
        (void)held;
        TrainResult result = train(split, cfg);
        save_checkpoint(result.scene, &result.state, t_out);
        if (!t_log.empty()) result.log.write_csv(t_log);
        std::cout << "trained " << result.scene.statics.size() << " static + "
                  << result.scene.dynamics.size() << " dynamic gaussians -> " << t_out << "\n";
    } else if (*render_cmd) {
        if (r_time < 0.0 || r_time > 1.0)
            throw std::invalid_argument("render: --time must be in [0,1]");
        Checkpoint ckpt = load_checkpoint(r_ckpt);
        auto [ds, held] = load_dataset(r_data, -1);
        (void)held;
        RenderOutput ro = rasterize(ckpt.scene, find_camera(ds, r_camera), r_time,
                                    ds.background, {});
        if (r_float_dump)
            write_float_dump(ro.rgb, r_out);
        else
            write_ppm(ro.rgb, r_out);
    } else if (*eval_cmd) {
        Checkpoint ckpt = load_checkpoint(e_ckpt);
        auto [split, held] = load_dataset(e_data, e_held);
        (void)split;
        MetricReport report = evaluate_views(ckpt.scene, held);
        std::ofstream file;
        if (!e_out.empty()) file.open(e_out);
        std::ostream& out = e_out.empty() ? std::cout : file;
        out << "frame,psnr,ssim\n";
        for (std::size_t i = 0; i < report.frames; ++i)
            out << i << ',' << report.frame_psnr[i] << ',' << report.frame_ssim[i] << '\n';
        out << "mean," << report.mean_psnr << ',' << report.mean_ssim << '\n';
    } else if (*cls_cmd) {
        if (c_bins < 1) throw std::invalid_argument("classify-stats: --bins must be >= 1");
        if (!(c_max > 0.0)) throw std::invalid_argument("classify-stats: --max must be > 0");
        Checkpoint ckpt = load_checkpoint(c_ckpt);
        ScaleHistogram hist = temporal_scale_histogram(ckpt.scene, c_bins, c_max);
        std::ofstream file;
        if (!c_out.empty()) file.open(c_out);
        std::ostream& out = c_out.empty() ? std::cout : file;
        out << "bin_lo,bin_hi,count\n";
        for (std::size_t i = 0; i < hist.counts.size(); ++i)
            out << hist.bin_edges[i] << ',' << hist.bin_edges[i + 1] << ',' << hist.counts[i]
                << '\n';
    } else if (*den_cmd) {
        if (d_time < 0.0 || d_time > 1.0)
            throw std::invalid_argument("density-map: --time must be in [0,1]");
        Checkpoint ckpt = load_checkpoint(d_ckpt);
        auto [ds, held] = load_dataset(d_data, -1);
        (void)held;
        const Camera& cam = find_camera(ds, d_camera);
        std::vector<uint32_t> counts = density_map(ckpt.scene, cam, d_time, d_dynamics_only);
        if (d_out.size() >= 4 && d_out.substr(d_out.size() - 4) == ".csv")
            write_csv_counts(counts, cam.width, cam.height, d_out);
        else
            write_pgm_counts(counts, cam.width, cam.height, d_out);
    } else if (*synth_cmd) {
        SynthSpec spec = s_spec.empty() ? SynthSpec{} : SynthSpec::from_file(s_spec);
        SyntheticScene synth = generate_synthetic(spec, s_seed);
        save_synthetic(synth, s_out);
        std::cout << "wrote " << synth.dataset.cameras.size() << " cameras x "
                  << synth.dataset.frames[0].size() << " frames to " << s_out << "\n";
    } else if (*abl_cmd) {
        TrainConfig base = a_config.empty() ? TrainConfig{} : TrainConfig::from_file(a_config);
        auto variants = load_ablation_matrix(a_matrix, base);
        auto [split, held] = load_dataset(a_data, a_held);
        auto rows = run_ablation(split, held, variants);
        write_ablation_csv(rows, a_out);
        for (const AblationRow& r : rows)
            std::cout << r.name << ": " << (r.failed ? "failed " + r.error
                                                     : "psnr " + std::to_string(r.psnr))
                      << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const NumericAbort& e) {
        std::cerr << "numeric abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
