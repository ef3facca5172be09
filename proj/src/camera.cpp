// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radval {

void Camera::validate() const {
    const Vec3 r0{rotation[0], rotation[1], rotation[2]};
    const Vec3 r1{rotation[3], rotation[4], rotation[5]};
    const Vec3 r2{rotation[6], rotation[7], rotation[8]};
    const double tol = 1e-6;
    if (std::abs(dot(r0, r0) - 1.0) > tol || std::abs(dot(r1, r1) - 1.0) > tol ||
        std::abs(dot(r2, r2) - 1.0) > tol || std::abs(dot(r0, r1)) > tol || std::abs(dot(r0, r2)) > tol ||
        std::abs(dot(r1, r2)) > tol) {
        throw std::invalid_argument("camera rotation is not orthonormal");
    }
    if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("camera focal lengths must be positive");
    if (width <= 0 || height <= 0) throw std::invalid_argument("camera resolution must be positive");
    if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
        throw std::invalid_argument("camera principal point outside image");
}

Camera Camera::scaled(int target_w, int target_h) const {
    const double sx = static_cast<double>(target_w) / width;
    const double sy = static_cast<double>(target_h) / height;
    Camera out = *this;
    out.width = target_w;
    out.height = target_h;
    out.fx = fx * sx;
    out.fy = fy * sy;
    out.cx = (cx + 0.5) * sx - 0.5;
    out.cy = (cy + 0.5) * sy - 0.5;
    return out;
}

Camera look_at_camera(const Vec3& eye, const Vec3& target, double focal_px, int width, int height,
                      const Vec3& up_hint) {
    const Vec3 f = normalized(target - eye);
    Vec3 hint = up_hint;
    if (norm(cross(f, hint)) < 1e-9) hint = Vec3{1, 0, 0};
    const Vec3 right = normalized(cross(f, hint));
    const Vec3 down = cross(f, right);  // unit: f and right are orthonormal

    Camera cam;
    cam.rotation = {right.x, down.x, f.x, right.y, down.y, f.y, right.z, down.z, f.z};
    cam.translation = eye;
    cam.fx = cam.fy = focal_px;
    cam.width = width;
    cam.height = height;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    return cam;
}

bool intersect_unit_cube(const Vec3& origin, const Vec3& dir, double& t_near, double& t_far) {
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        const double o = origin[axis];
        const double d = dir[axis];
        if (std::abs(d) < 1e-300) {
            if (o < 0.0 || o > 1.0) return false;
            continue;
        }
        double ta = (0.0 - o) / d;
        double tb = (1.0 - o) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) return false;
    }
    t_near = t0;
    t_far = t1;
    return true;
}

Ray generate_ray(const Camera& cam, double u, double v) {
    const Vec3 dir_cam{(u + 0.5 - cam.cx) / cam.fx, (v + 0.5 - cam.cy) / cam.fy, 1.0};
    const Vec3 dir = normalized(cam.rotate(dir_cam));

    Ray ray;
    ray.origin = cam.translation;
    ray.direction = dir;
    if (!intersect_unit_cube(ray.origin, dir, ray.t_near, ray.t_far)) {
        ray.t_near = ray.t_far = 0.0;
    }
    return ray;
}

}  // namespace radval
