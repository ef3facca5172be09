// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference renderer for analytic scenes, written from the emission-absorption
// integral directly: its own slab clipper, its own pixel-to-ray math, and the
// exact scene field instead of a voxel grid. It shares no render code with the
// library, so agreement between the two is evidence, not tautology.

#include <algorithm>
#include <cmath>

#include "radval/camera.hpp"
#include "radval/image.hpp"
#include "radval/scene.hpp"
#include "radval/vec3.hpp"

namespace radval::test {

inline bool oracle_clip_unit_cube(const Vec3& o, const Vec3& d, double& t0, double& t1) {
    t0 = 0.0;
    t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < 0.0 || o[a] > 1.0) return false;
            continue;
        }
        double lo = (0.0 - o[a]) / d[a];
        double hi = (1.0 - o[a]) / d[a];
        if (lo > hi) std::swap(lo, hi);
        t0 = std::max(t0, lo);
        t1 = std::min(t1, hi);
    }
    return t0 < t1;
}

// Midpoint-rule march of the exact scene field.
inline Vec3 oracle_march(const SceneSpec& spec, const Vec3& origin, const Vec3& dir, int n_samples) {
    double t0 = 0.0, t1 = 0.0;
    if (!oracle_clip_unit_cube(origin, dir, t0, t1)) return {0, 0, 0};
    const double dt = (t1 - t0) / n_samples;
    double transmittance = 1.0;
    Vec3 out{0, 0, 0};
    for (int i = 0; i < n_samples; ++i) {
        const double t = t0 + (i + 0.5) * dt;
        const Vec3 p = origin + dir * t;
        double density = 0.0;
        Vec3 rgb;
        sample_scene(spec, p, density, rgb);
        const double alpha = 1.0 - std::exp(-density * dt);
        out += rgb * (transmittance * alpha);
        transmittance *= 1.0 - alpha;
    }
    return out;
}

// Whole frame. Pixel directions are rebuilt here from the intrinsics so the
// library's generate_ray is not in the loop.
inline Image oracle_render(const SceneSpec& spec, const Camera& cam, int n_samples) {
    Image img(cam.width, cam.height);
    for (int v = 0; v < cam.height; ++v) {
        for (int u = 0; u < cam.width; ++u) {
            const Vec3 dir_cam{(u + 0.5 - cam.cx) / cam.fx, (v + 0.5 - cam.cy) / cam.fy, 1.0};
            const Vec3 dir_world = normalized(Vec3{
                cam.rotation[0] * dir_cam.x + cam.rotation[1] * dir_cam.y + cam.rotation[2] * dir_cam.z,
                cam.rotation[3] * dir_cam.x + cam.rotation[4] * dir_cam.y + cam.rotation[5] * dir_cam.z,
                cam.rotation[6] * dir_cam.x + cam.rotation[7] * dir_cam.y + cam.rotation[8] * dir_cam.z});
            img.set(u, v, oracle_march(spec, cam.translation, dir_world, n_samples));
        }
    }
    return img;
}

inline double mean_abs_diff(const Image& a, const Image& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) sum += std::abs(a.pixels[i] - b.pixels[i]);
    return sum / static_cast<double>(a.pixels.size());
}

}  // namespace radval::test
