// SPDX-License-Identifier: Apache-2.0
#include "hgs/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hgs {

bool is_static(const Gaussian4D& g, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("is_static: tau must be positive");
    return g.temporal_scale() > tau;
}

// Mean of the temporal opacity weight exp(-(t - mu)^2 / 2 sigma^2) over the
// normalized sequence span [0, 1]. A 3D Gaussian renders with weight 1 at
// every time, so conversion folds this average into the opacity; in the wide
// limit the mean is exactly 1 and the opacity is untouched.
static double mean_temporal_weight(double mean_t, double sigma_t) {
    const double s = sigma_t * std::sqrt(2.0);
    double w = sigma_t * std::sqrt(M_PI / 2.0) *
               (std::erf((1.0 - mean_t) / s) + std::erf(mean_t / s));
    return w < 1.0 ? w : 1.0;
}

static double fold_temporal_weight(double opacity_logit, double mean_t, double sigma_t) {
    double w = mean_temporal_weight(mean_t, sigma_t);
    if (w >= 1.0 - 1e-12) return opacity_logit;
    double alpha = sigmoid(opacity_logit) * w;
    return std::log(alpha) - std::log1p(-alpha);
}

Gaussian3D convert_4d_to_3d(const Gaussian4D& g) {
    Gaussian3D out;
    out.mean = g.mean_x;
    out.rot = rot3_to_quat(extract_spatial_rot(g.rotation4()).rot);
    out.log_scales = g.log_scales.head<3>();
    out.opacity_logit = fold_temporal_weight(g.opacity_logit, g.mean_t, g.temporal_scale());
    out.color = g.color;
    return out;
}

ConversionReport sweep_convert(HybridScene& scene, std::vector<std::size_t>* moved) {
    ConversionReport report;
    std::vector<Gaussian4D> kept;
    kept.reserve(scene.dynamics.size());
    double leak_sum = 0.0;
    for (std::size_t i = 0; i < scene.dynamics.size(); ++i) {
        Gaussian4D& g = scene.dynamics[i];
        if (is_static(g, scene.tau)) {
            SpatialRot sr = extract_spatial_rot(g.rotation4());
            Gaussian3D converted;
            converted.mean = g.mean_x;
            converted.rot = rot3_to_quat(sr.rot);
            converted.log_scales = g.log_scales.head<3>();
            converted.opacity_logit =
                fold_temporal_weight(g.opacity_logit, g.mean_t, g.temporal_scale());
            converted.color = g.color;
            scene.statics.push_back(std::move(converted));
            report.count++;
            report.max_leakage = std::max(report.max_leakage, sr.leakage);
            leak_sum += sr.leakage;
            if (moved) moved->push_back(i);
        } else {
            kept.push_back(std::move(g));
        }
    }
    scene.dynamics = std::move(kept);
    if (report.count > 0) report.mean_leakage = leak_sum / double(report.count);
    return report;
}

ScaleHistogram temporal_scale_histogram(const HybridScene& scene, int bins, double max_scale) {
    if (bins < 1) throw std::invalid_argument("temporal_scale_histogram: bins must be >= 1");
    if (!(max_scale > 0.0)) throw std::invalid_argument("temporal_scale_histogram: max_scale must be > 0");
    ScaleHistogram h;
    h.counts.assign(std::size_t(bins), 0);
    h.bin_edges.resize(std::size_t(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.bin_edges[i] = max_scale * double(i) / double(bins);
    for (const Gaussian4D& g : scene.dynamics) {
        double s = g.temporal_scale();
        int bin = std::min(bins - 1, int(s / max_scale * bins));
        h.counts[std::size_t(std::max(0, bin))]++;
    }
    return h;
}

}  // namespace hgs
