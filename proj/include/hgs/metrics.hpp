// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <vector>

#include "hgs/image.hpp"

namespace hgs {

// 10*log10(1/MSE) on linear [0,1] images; +inf sentinel for identical inputs.
double psnr(const Image& a, const Image& b);

// Single-scale SSIM, 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03,
// valid-region convolution, per channel then averaged.
double ssim(const Image& a, const Image& b);

// SSIM plus d(SSIM)/d(a); the backward pass of the photometric loss.
double ssim_with_grad(const Image& a, const Image& b, Image& grad_a);

struct MetricReport {
    std::vector<double> frame_psnr;
    std::vector<double> frame_ssim;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    std::size_t frames = 0;

    void add(double p, double s);
};

}  // namespace hgs
