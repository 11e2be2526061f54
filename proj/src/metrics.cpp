// SPDX-License-Identifier: Apache-2.0
#include "hgs/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace hgs {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::vector<double>& window() {
    static const std::vector<double> w = [] {
        std::vector<double> out(kWin * kWin);
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i)
            for (int j = 0; j < kWin; ++j) {
                double di = i - kWin / 2, dj = j - kWin / 2;
                out[i * kWin + j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
                sum += out[i * kWin + j];
            }
        for (double& v : out) v /= sum;
        return out;
    }();
    return w;
}

void check_shapes(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("metrics: image dimensions differ");
}

// Shared SSIM core; accumulates gradient wrt `a` when grad != nullptr.
double ssim_impl(const Image& a, const Image& b, Image* grad) {
    check_shapes(a, b);
    if (a.width < kWin || a.height < kWin)
        throw std::invalid_argument("ssim: images smaller than the 11x11 window");
    const auto& w = window();
    const int vw = a.width - kWin + 1, vh = a.height - kWin + 1;
    const std::size_t n_valid = std::size_t(vw) * vh * 3;
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        for (int vy = 0; vy < vh; ++vy)
            for (int vx = 0; vx < vw; ++vx) {
                double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
                for (int i = 0; i < kWin; ++i)
                    for (int j = 0; j < kWin; ++j) {
                        double wi = w[i * kWin + j];
                        double va = a.at(vx + j, vy + i, c);
                        double vb = b.at(vx + j, vy + i, c);
                        mu_a += wi * va;
                        mu_b += wi * vb;
                        aa += wi * va * va;
                        bb += wi * vb * vb;
                        ab += wi * va * vb;
                    }
                double var_a = aa - mu_a * mu_a;
                double var_b = bb - mu_b * mu_b;
                double cov = ab - mu_a * mu_b;
                double a1 = 2.0 * mu_a * mu_b + kC1;
                double a2 = 2.0 * cov + kC2;
                double b1 = mu_a * mu_a + mu_b * mu_b + kC1;
                double b2 = var_a + var_b + kC2;
                double denom = b1 * b2;
                double s = a1 * a2 / denom;
                total += s;
                if (grad) {
                    double d_mu = (a2 / denom) * 2.0 * mu_b - (s / b1) * 2.0 * mu_a;
                    double d_var = -s / b2;
                    double d_cov = 2.0 * a1 / denom;
                    for (int i = 0; i < kWin; ++i)
                        for (int j = 0; j < kWin; ++j) {
                            double wi = w[i * kWin + j];
                            double va = a.at(vx + j, vy + i, c);
                            double vb = b.at(vx + j, vy + i, c);
                            grad->at(vx + j, vy + i, c) +=
                                wi * (d_mu + d_var * 2.0 * (va - mu_a) + d_cov * (vb - mu_b)) /
                                double(n_valid);
                        }
                }
            }
    }
    return total / double(n_valid);
}

}  // namespace

double psnr(const Image& a, const Image& b) {
    check_shapes(a, b);
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= double(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) { return ssim_impl(a, b, nullptr); }

double ssim_with_grad(const Image& a, const Image& b, Image& grad_a) {
    grad_a = Image(a.width, a.height);
    return ssim_impl(a, b, &grad_a);
}

void MetricReport::add(double p, double s) {
    frame_psnr.push_back(p);
    frame_ssim.push_back(s);
    frames = frame_psnr.size();
    double sp = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < frames; ++i) {
        sp += frame_psnr[i];
        ss += frame_ssim[i];
    }
    mean_psnr = sp / double(frames);
    mean_ssim = ss / double(frames);
}

}  // namespace hgs
