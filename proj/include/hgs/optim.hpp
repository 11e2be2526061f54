// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace hgs {

// First/second Adam moments for one parameter class, n_rows * dim values.
struct AdamBuf {
    std::vector<double> m, v;

    void resize_rows(std::size_t rows, std::size_t dim) {
        m.assign(rows * dim, 0.0);
        v.assign(rows * dim, 0.0);
    }
    std::size_t rows(std::size_t dim) const { return dim == 0 ? 0 : m.size() / dim; }
};

struct PoolState3D {
    AdamBuf mean, quat, scales, opacity, sh;
    void resize(std::size_t rows, std::size_t sh_dim);
};

struct PoolState4D {
    AdamBuf mean_x, mean_t, quat_left, quat_right, scales, opacity, sh;
    void resize(std::size_t rows, std::size_t sh_dim);
};

// Optimizer state + densification statistics, index-aligned with the scene
// pools. Every densify/prune/convert event remaps these explicitly.
struct GradAccum {
    PoolState3D statics;
    PoolState4D dynamics;
    std::vector<double> grad_norm3, grad_norm4;  // accumulated screen-gradient norms
    std::vector<uint32_t> count3, count4;        // observation counts
    uint64_t step = 0;
    std::size_t skipped_nonfinite = 0;

    void resize(std::size_t n3, std::size_t n4, std::size_t sh_dim);
};

inline void PoolState3D::resize(std::size_t rows, std::size_t sh_dim) {
    mean.resize_rows(rows, 3);
    quat.resize_rows(rows, 4);
    scales.resize_rows(rows, 3);
    opacity.resize_rows(rows, 1);
    sh.resize_rows(rows, sh_dim);
}

inline void PoolState4D::resize(std::size_t rows, std::size_t sh_dim) {
    mean_x.resize_rows(rows, 3);
    mean_t.resize_rows(rows, 1);
    quat_left.resize_rows(rows, 4);
    quat_right.resize_rows(rows, 4);
    scales.resize_rows(rows, 4);
    opacity.resize_rows(rows, 1);
    sh.resize_rows(rows, sh_dim);
}

inline void GradAccum::resize(std::size_t n3, std::size_t n4, std::size_t sh_dim) {
    statics.resize(n3, sh_dim);
    dynamics.resize(n4, sh_dim);
    grad_norm3.assign(n3, 0.0);
    grad_norm4.assign(n4, 0.0);
    count3.assign(n3, 0);
    count4.assign(n4, 0);
}

}  // namespace hgs
