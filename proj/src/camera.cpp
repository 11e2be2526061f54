// SPDX-License-Identifier: Apache-2.0
#include "hgs/camera.hpp"

namespace hgs {

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up,
                       double focal, int width, int height) {
    Vec3 fwd = (target - eye).normalized();
    Vec3 right = fwd.cross(up).normalized();
    Vec3 down = fwd.cross(right);
    Camera cam;
    cam.rot.row(0) = right;
    cam.rot.row(1) = down;
    cam.rot.row(2) = fwd;
    cam.trans = -cam.rot * eye;
    cam.fx = cam.fy = focal;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    cam.width = width;
    cam.height = height;
    return cam;
}

}  // namespace hgs
