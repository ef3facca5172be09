// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radval {

Image resize_area(const Image& src, int target_w, int target_h) {
    if (target_w < 1 || target_h < 1) throw std::invalid_argument("resize_area: target size must be positive");
    if (target_w == src.width && target_h == src.height) return src;

    Image out(target_w, target_h);
    const double sx = static_cast<double>(src.width) / target_w;
    const double sy = static_cast<double>(src.height) / target_h;
    for (int ty = 0; ty < target_h; ++ty) {
        const double y0 = ty * sy;
        const double y1 = (ty + 1) * sy;
        const int iy0 = static_cast<int>(std::floor(y0));
        const int iy1 = std::min(src.height - 1, static_cast<int>(std::ceil(y1)) - 1);
        for (int tx = 0; tx < target_w; ++tx) {
            const double x0 = tx * sx;
            const double x1 = (tx + 1) * sx;
            const int ix0 = static_cast<int>(std::floor(x0));
            const int ix1 = std::min(src.width - 1, static_cast<int>(std::ceil(x1)) - 1);
            Vec3 acc{};
            double area = 0.0;
            for (int iy = iy0; iy <= iy1; ++iy) {
                const double hy = std::min<double>(y1, iy + 1) - std::max<double>(y0, iy);
                if (hy <= 0.0) continue;
                for (int ix = ix0; ix <= ix1; ++ix) {
                    const double wx = std::min<double>(x1, ix + 1) - std::max<double>(x0, ix);
                    if (wx <= 0.0) continue;
                    acc += src.at(ix, iy) * (wx * hy);
                    area += wx * hy;
                }
            }
            out.set(tx, ty, acc / area);
        }
    }
    return out;
}

std::vector<std::uint8_t> quantize8(const Image& img) {
    std::vector<std::uint8_t> out(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const double v = std::clamp(img.pixels[i], 0.0, 1.0);
        out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return out;
}

Image dequantize8(const std::uint8_t* data, int width, int height) {
    Image img(width, height);
    const std::size_t n = img.pixels.size();
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = data[i] / 255.0;
    return img;
}

}  // namespace radval
