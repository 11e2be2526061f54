// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hgs {

// Linear RGB image, row-major, interleaved channels, double precision.
struct Image {
    int width = 0, height = 0;
    std::vector<double> data;  // size h*w*3

    Image() = default;
    Image(int w, int h, double fill = 0.0) : width(w), height(h), data(std::size_t(w) * h * 3, fill) {}

    double& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }
    std::size_t pixels() const { return std::size_t(width) * height; }
    bool same_shape(const Image& other) const {
        return width == other.width && height == other.height;
    }
};

// 8-bit binary PPM (P6), sRGB-encoded from linear with gamma 1/2.2.
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);

// Applies the same 8-bit encode/decode as a PPM save/load roundtrip, so an
// in-memory image can be made pixel-exact with its on-disk form.
Image quantize_8bit(const Image& img);

// Raw 32-bit float planar dump (exact-test format): little-endian header
// "HGSF" + width + height, then R plane, G plane, B plane.
void write_float_dump(const Image& img, const std::string& path);
Image read_float_dump(const std::string& path);

// 16-bit binary PGM (P5) for count maps, plus a CSV form.
void write_pgm_counts(const std::vector<uint32_t>& counts, int width, int height,
                      const std::string& path);
void write_csv_counts(const std::vector<uint32_t>& counts, int width, int height,
                      const std::string& path);

}  // namespace hgs
