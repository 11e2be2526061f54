// SPDX-License-Identifier: Apache-2.0
#include "hgs/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hgs/errors.hpp"

namespace hgs {

namespace {

uint8_t linear_to_srgb8(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return uint8_t(std::lround(std::pow(v, 1.0 / 2.2) * 255.0));
}

double srgb8_to_linear(uint8_t v) {
    return std::pow(double(v) / 255.0, 2.2);
}

void skip_ppm_whitespace(std::istream& in) {
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') in.ignore(1 << 16, '\n');
        else in.get();
        c = in.peek();
    }
}

}  // namespace

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("write_ppm: cannot open " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> row(std::size_t(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                row[std::size_t(x) * 3 + c] = linear_to_srgb8(img.at(x, y, c));
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!out) throw FormatError("write_ppm: write failed for " + path);
}

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_ppm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw FormatError("read_ppm: not a P6 file: " + path);
    skip_ppm_whitespace(in);
    int w = 0, h = 0, maxval = 0;
    in >> w;
    skip_ppm_whitespace(in);
    in >> h;
    skip_ppm_whitespace(in);
    in >> maxval;
    if (!in || w <= 0 || h <= 0 || maxval != 255)
        throw FormatError("read_ppm: bad header in " + path);
    in.get();  // single whitespace after maxval
    Image img(w, h);
    std::vector<uint8_t> row(std::size_t(w) * 3);
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size()));
        if (!in) throw FormatError("read_ppm: truncated pixel data in " + path);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = srgb8_to_linear(row[std::size_t(x) * 3 + c]);
    }
    return img;
}

Image quantize_8bit(const Image& img) {
    Image out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = srgb8_to_linear(linear_to_srgb8(img.data[i]));
    return out;
}

void write_float_dump(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("write_float_dump: cannot open " + path);
    out.write("HGSF", 4);
    uint32_t wh[2] = {uint32_t(img.width), uint32_t(img.height)};
    out.write(reinterpret_cast<const char*>(wh), 8);
    std::vector<float> plane(img.pixels());
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                plane[std::size_t(y) * img.width + x] = float(img.at(x, y, c));
        out.write(reinterpret_cast<const char*>(plane.data()),
                  std::streamsize(plane.size() * sizeof(float)));
    }
    if (!out) throw FormatError("write_float_dump: write failed for " + path);
}

Image read_float_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_float_dump: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "HGSF", 4) != 0)
        throw FormatError("read_float_dump: bad magic in " + path);
    uint32_t wh[2];
    in.read(reinterpret_cast<char*>(wh), 8);
    if (!in || wh[0] == 0 || wh[1] == 0) throw FormatError("read_float_dump: bad header");
    Image img{int(wh[0]), int(wh[1])};
    std::vector<float> plane(img.pixels());
    for (int c = 0; c < 3; ++c) {
        in.read(reinterpret_cast<char*>(plane.data()),
                std::streamsize(plane.size() * sizeof(float)));
        if (!in) throw FormatError("read_float_dump: truncated data in " + path);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                img.at(x, y, c) = plane[std::size_t(y) * img.width + x];
    }
    return img;
}

void write_pgm_counts(const std::vector<uint32_t>& counts, int width, int height,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("write_pgm_counts: cannot open " + path);
    out << "P5\n" << width << " " << height << "\n65535\n";
    for (uint32_t v : counts) {
        uint16_t clamped = uint16_t(std::min<uint32_t>(v, 65535));
        uint8_t be[2] = {uint8_t(clamped >> 8), uint8_t(clamped & 0xff)};
        out.write(reinterpret_cast<const char*>(be), 2);
    }
}

void write_csv_counts(const std::vector<uint32_t>& counts, int width, int height,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("write_csv_counts: cannot open " + path);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            out << counts[std::size_t(y) * width + x];
            out << (x + 1 == width ? '\n' : ',');
        }
    }
}

}  // namespace hgs
