// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radval/dataset.hpp"
#include "radval/grid.hpp"
#include "radval/rng.hpp"
#include "radval/vec3.hpp"

namespace radval {

// Analytic scene inside the unit cube: hard-edged primitives over an optional
// smooth background gradient. Later primitives win where they overlap.
struct Primitive {
    enum class Shape { kSphere, kBox };
    Shape shape = Shape::kSphere;
    Vec3 center{0.5, 0.5, 0.5};
    Vec3 size{0.1, 0.1, 0.1};  // sphere: radius in x; box: half extents
    double density = 1.0;
    Vec3 rgb{1.0, 1.0, 1.0};
};

struct Background {
    double density = 0.0;
    Vec3 rgb_lo{0.0, 0.0, 0.0};
    Vec3 rgb_hi{0.0, 0.0, 0.0};
    int axis = 1;  // color lerps from rgb_lo to rgb_hi along this axis
};

struct SceneSpec {
    std::vector<Primitive> primitives;
    std::optional<Background> background;
};

// Field value at p: background first, then primitives in list order.
void sample_scene(const SceneSpec& spec, const Vec3& p, double& density, Vec3& rgb);

// A small multi-object scene that trains well at 32^3 / 64x64.
SceneSpec default_scene();

// JSON scene files: {"background": {...}|null, "primitives": [...]}.
SceneSpec load_scene(const std::string& path);
void save_scene(const std::string& path, const SceneSpec& spec);

// Grid whose activated values equal the analytic field at each lattice point.
VoxelGrid bake_scene(const SceneSpec& spec, const Vec3i& dims);

// Cameras on a sphere zone around look_at, radii uniform in radius_range,
// every forward axis pointing at look_at. The base focal length frames the
// central portion of the scene (tan(half fov) = 0.8 / radius); a log-uniform
// zoom factor in [zoom_min, zoom_max] then varies the framing per camera so
// views differ in information content.
std::vector<Camera> sample_cameras(int n, SplitMix64& rng, double radius_min, double radius_max,
                                   const Vec3& look_at, int width, int height, double zoom_min = 0.5,
                                   double zoom_max = 1.7);

// Applies one corruption. Occluder: a random rectangle of the requested area
// fraction (one row of rounding slack) filled with the given color. Noise:
// additive Gaussian clamped to [0,1]. Exposure: multiply then clamp.
Image corrupt(const Image& image, const Corruption& corruption, SplitMix64& rng);

struct GenerateOptions {
    int n_train = 64;
    int n_val = 8;
    int n_test = 8;
    int width = 64;
    int height = 64;
    Vec3i bake_dims{32, 32, 32};
    int n_samples = 64;
    double radius_min = 1.7;
    double radius_max = 2.6;
    double zoom_min = 0.5;  // log-uniform per-camera zoom range; varies how
    double zoom_max = 1.7;  // much of the frame the scene fills
};

// (train image id -> corruption) assignments.
struct CorruptionPlan {
    std::vector<std::pair<int, Corruption>> entries;
};

// Picks `round(fraction * n_train)` distinct train ids for the template
// corruption, deterministically from the seed.
CorruptionPlan plan_corruption(int n_train, double fraction, const Corruption& tmpl, std::uint64_t seed);

// Bakes the scene, renders ground-truth views (the baked grid is then
// discarded; training always starts from scratch), applies the corruption
// plan to train images, and writes PNGs plus manifest.json under out_dir.
// Returns the manifest path.
std::string generate_dataset(const SceneSpec& spec, const std::string& scene_path, const GenerateOptions& opts,
                             const CorruptionPlan& plan, std::uint64_t seed, const std::string& out_dir);

}  // namespace radval
