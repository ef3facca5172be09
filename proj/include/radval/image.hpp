// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "radval/vec3.hpp"

namespace radval {

// RGB raster with channels in [0, peak] (peak is 1.0 everywhere in this
// codebase; 8-bit quantization happens only at the PNG boundary). Pixels are
// stored row-major, y slowest, channels interleaved.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // size width * height * 3

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0.0) {}

    std::size_t offset(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * 3; }

    Vec3 at(int x, int y) const {
        const std::size_t o = offset(x, y);
        return {pixels[o], pixels[o + 1], pixels[o + 2]};
    }

    void set(int x, int y, const Vec3& rgb) {
        const std::size_t o = offset(x, y);
        pixels[o] = rgb.x;
        pixels[o + 1] = rgb.y;
        pixels[o + 2] = rgb.z;
    }

    bool same_size(const Image& o) const { return width == o.width && height == o.height; }
};

// Area-average resample to target_w x target_h. Each output pixel averages the
// source box it covers, with fractional edge coverage, so any scale is exact
// and deterministic.
Image resize_area(const Image& src, int target_w, int target_h);

// Round-trip with 8-bit storage: round(c * 255) clamped, and /255 on the way
// back. Matches what the PNG layer does to dataset images.
std::vector<std::uint8_t> quantize8(const Image& img);
Image dequantize8(const std::uint8_t* data, int width, int height);

}  // namespace radval
