// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "radval/vec3.hpp"

namespace radval {

// Ray clipped against the unit scene cube. A degenerate interval
// (t_near == t_far) flags a miss; the renderer returns background for it.
struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double t_near = 0.0;
    double t_far = 0.0;

    bool degenerate() const { return !(t_near < t_far); }
};

// Pinhole camera. pose is world-from-camera: x_world = R * x_cam + t, with the
// camera looking along +z, image x right, image y down.
struct Camera {
    std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major R
    Vec3 translation;                                              // camera center in world
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;

    Vec3 rotate(const Vec3& v) const {
        return {rotation[0] * v.x + rotation[1] * v.y + rotation[2] * v.z,
                rotation[3] * v.x + rotation[4] * v.y + rotation[5] * v.z,
                rotation[6] * v.x + rotation[7] * v.y + rotation[8] * v.z};
    }

    Vec3 forward() const { return {rotation[2], rotation[5], rotation[8]}; }

    // Throws std::invalid_argument if the rotation is not orthonormal within
    // 1e-6 or the intrinsics are out of range.
    void validate() const;

    // Camera with intrinsics and resolution scaled by (target_w / width,
    // target_h / height), principal point adjusted for pixel-center alignment.
    Camera scaled(int target_w, int target_h) const;
};

// Camera at eye looking at target, image y pointing world-down (up_hint picks
// the roll; a fallback axis is used when the view is parallel to it).
Camera look_at_camera(const Vec3& eye, const Vec3& target, double focal_px, int width, int height,
                      const Vec3& up_hint = {0, 1, 0});

// Ray through pixel center (u + 0.5, v + 0.5), clipped to the unit cube.
Ray generate_ray(const Camera& cam, double u, double v);

// Slab intersection of origin + t * dir with [0,1]^3, clamped to t >= 0.
// Returns false on a miss.
bool intersect_unit_cube(const Vec3& origin, const Vec3& dir, double& t_near, double& t_far);

}  // namespace radval
