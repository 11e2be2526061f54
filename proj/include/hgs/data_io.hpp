// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hgs/camera.hpp"
#include "hgs/image.hpp"
#include "hgs/optim.hpp"
#include "hgs/scene.hpp"

namespace hgs {

struct InitPoint {
    Vec3 position;
    Vec3 rgb;
};
using InitPoints = std::vector<InitPoint>;

struct Frame {
    Image image;
    double time = 0.0;  // normalized to [0,1]
};

struct MultiViewDataset {
    std::vector<Camera> cameras;
    std::vector<int> camera_ids;
    std::vector<std::vector<Frame>> frames;  // per camera, time-ordered
    double duration_seconds = 1.0;
    Vec3 background = Vec3::Zero();
    InitPoints init_points;  // from root/points.txt when present

    std::size_t total_frames() const {
        std::size_t n = 0;
        for (const auto& f : frames) n += f.size();
        return n;
    }
};

struct InitConfig {
    int sh_degree = 1;
    double tau = 0.5;
    double duration_seconds = 1.0;
    double init_temporal_scale = 0.1;   // exp(s_t) at init, inside the dynamic regime
    double init_opacity = 0.1;
};

// Dataset layout: root/cameras.txt, root/camXX/frame_%05d.ppm, optional
// root/meta.txt, optional root/points.txt (see docs/formats.md).
std::pair<MultiViewDataset, MultiViewDataset> load_dataset(const std::string& root,
                                                           int held_out_camera);
void save_dataset(const MultiViewDataset& ds, const std::string& root);

InitPoints load_points(const std::string& path);
void save_points(const InitPoints& points, const std::string& path);

// One 4D Gaussian per point; statics pool empty. Throws on < 4 points.
HybridScene init_scene(const InitPoints& points, const InitConfig& cfg);

struct SynthSpec {
    int n_static = 60;        // wall + floor Gaussians
    int n_dynamic = 3;        // moving blobs
    int chain_length = 8;     // 4D Gaussians per moving blob
    int n_cameras = 4;
    int n_frames = 20;
    int width = 64, height = 64;
    double ring_radius = 4.0;
    double duration_seconds = 2.0;
    double focal = 70.0;
    int n_init_points = 200;

    static SynthSpec from_file(const std::string& path);
};

struct SyntheticScene {
    MultiViewDataset dataset;
    HybridScene ground_truth;
    InitPoints init_points;
};

// Deterministic synthetic benchmark: static wall/floor plus dynamic blobs
// encoded as chains of 4D Gaussians along smooth paths, rendered with the
// reference renderer. Frames are quantized through the 8-bit disk transform
// so a save/load roundtrip is pixel-exact.
SyntheticScene generate_synthetic(const SynthSpec& spec, uint64_t seed);
void save_synthetic(const SyntheticScene& synth, const std::string& root);

// Versioned, CRC-checked binary checkpoint; roundtrips bit-exactly.
void save_checkpoint(const HybridScene& scene, const GradAccum* state,
                     const std::string& path);
struct Checkpoint {
    HybridScene scene;
    std::optional<GradAccum> state;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hgs
