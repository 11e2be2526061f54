// SPDX-License-Identifier: Apache-2.0
#include "hgs/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "hgs/metrics.hpp"

namespace hgs {

namespace {

double l1(const Image& a, const Image& b, Image* grad) {
    double sum = 0.0;
    const double n = double(a.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        sum += std::abs(d);
        if (grad) grad->data[i] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
    }
    return sum / n;
}

}  // namespace

double photometric_loss(const Image& rendered, const Image& gt, double ssim_lambda) {
    if (!rendered.same_shape(gt))
        throw std::invalid_argument("photometric_loss: image dimensions differ");
    double loss = (1.0 - ssim_lambda) * l1(rendered, gt, nullptr);
    if (ssim_lambda != 0.0) loss += ssim_lambda * (1.0 - ssim(rendered, gt));
    return loss;
}

double photometric_loss_with_grad(const Image& rendered, const Image& gt,
                                  double ssim_lambda, Image& grad) {
    if (!rendered.same_shape(gt))
        throw std::invalid_argument("photometric_loss: image dimensions differ");
    grad = Image(rendered.width, rendered.height);
    double loss = (1.0 - ssim_lambda) * l1(rendered, gt, &grad);
    for (double& v : grad.data) v *= (1.0 - ssim_lambda);
    if (ssim_lambda != 0.0) {
        Image ssim_grad;
        double s = ssim_with_grad(rendered, gt, ssim_grad);
        loss += ssim_lambda * (1.0 - s);
        for (std::size_t i = 0; i < grad.data.size(); ++i)
            grad.data[i] -= ssim_lambda * ssim_grad.data[i];
    }
    return loss;
}

}  // namespace hgs
