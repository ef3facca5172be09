// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "radval/camera.hpp"
#include "radval/grid.hpp"
#include "radval/image.hpp"
#include "radval/rng.hpp"

namespace radval {

// One quadrature point along a ray: position t, interval length delta, and
// the field values interpolated there.
struct RenderSample {
    double t = 0.0;
    double delta = 0.0;
    double sigma = 0.0;
    Vec3 rgb;
};

struct RenderResult {
    Vec3 rgb;                    // composited over black background
    double transmittance = 1.0;  // product of (1 - alpha_i)
};

// Front-to-back emission-absorption compositing: alpha_i = 1 - exp(-sigma_i
// delta_i), out = sum T_i alpha_i c_i with T_i = prod_{j<i} (1 - alpha_j).
// The weights T_i alpha_i plus the returned transmittance always sum to 1.
RenderResult composite(std::span<const RenderSample> samples);

// Stratified sample positions over [t_near, t_far]: n equal bins, midpoint of
// each (or a jittered offset when rng is given); delta is the bin width.
// Returns no samples for a degenerate ray.
std::vector<RenderSample> sample_ray(const VoxelGrid& grid, const Ray& ray, int n_samples,
                                     SplitMix64* jitter_rng = nullptr);

RenderResult render_ray(const VoxelGrid& grid, const Ray& ray, int n_samples, SplitMix64* jitter_rng = nullptr);

// Gradient of dot(render_ray(...).rgb, d_rgb) with respect to the raw grid
// parameters of one cell.
struct CellGrad {
    std::size_t cell = 0;
    double d[4] = {0, 0, 0, 0};  // (density_raw, r_raw, g_raw, b_raw)
};

// Analytic gradient through compositing, interpolation and activations.
// Entries are coalesced per cell and sorted by cell index; cells the ray does
// not touch are absent (zero gradient). Pass a copy of the forward pass's
// jitter stream so both walks see identical sample positions.
std::vector<CellGrad> render_ray_backward(const VoxelGrid& grid, const Ray& ray, int n_samples, const Vec3& d_rgb,
                                          SplitMix64* jitter_rng = nullptr);

// Dense accumulation target for training steps. Gradients are added in call
// order; `touched` lists the affected cells (unsorted, deduplicated).
struct GradAccumulator {
    std::vector<double> grad;         // 4 per cell
    std::vector<std::uint8_t> seen;   // per cell
    std::vector<std::size_t> touched;

    explicit GradAccumulator(std::size_t cell_count) : grad(cell_count * 4, 0.0), seen(cell_count, 0) {}
    void reset();
    void add(std::size_t cell, const double d[4]);
};

void render_ray_backward_into(const VoxelGrid& grid, const Ray& ray, int n_samples, const Vec3& d_rgb,
                              SplitMix64* jitter_rng, GradAccumulator& acc);

// Per-pixel render_ray over the full camera frame; rows are evaluated in
// parallel, output is independent of the worker count.
Image render_image(const VoxelGrid& grid, const Camera& cam, int n_samples);

}  // namespace radval
