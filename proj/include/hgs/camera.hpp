// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include "hgs/gauss_math.hpp"

namespace hgs {

// Pinhole camera with a world-to-camera rigid transform (x_cam = R x + t).
struct Camera {
    double fx = 0, fy = 0, cx = 0, cy = 0;
    Mat3 rot = Mat3::Identity();
    Vec3 trans = Vec3::Zero();
    int width = 0, height = 0;
    double near = 0.01, far = 100.0;

    Vec3 to_camera(const Vec3& p) const { return rot * p + trans; }
    Vec3 position() const { return -rot.transpose() * trans; }

    void validate() const {
        if (!(fx > 0.0 && fy > 0.0)) throw std::invalid_argument("Camera: fx, fy must be positive");
        if (!(0.0 < near && near < far)) throw std::invalid_argument("Camera: need 0 < near < far");
        if (width <= 0 || height <= 0) throw std::invalid_argument("Camera: bad image dimensions");
        if (!is_rotation(rot)) throw std::invalid_argument("Camera: rotation not orthonormal");
    }

    // Camera at `eye` looking at `target`, up = +y by default.
    static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up,
                          double focal, int width, int height);
};

}  // namespace hgs
