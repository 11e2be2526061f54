// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hgs/image.hpp"

namespace hgs {

// (1 - lambda) * L1 + lambda * (1 - SSIM).
double photometric_loss(const Image& rendered, const Image& gt, double ssim_lambda);

// Loss value plus d(loss)/d(rendered).
double photometric_loss_with_grad(const Image& rendered, const Image& gt,
                                  double ssim_lambda, Image& grad);

}  // namespace hgs
