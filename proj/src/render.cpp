// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radval/parallel.hpp"

namespace radval {

RenderResult composite(std::span<const RenderSample> samples) {
    RenderResult r;
    double t_acc = 1.0;
    for (const RenderSample& s : samples) {
        const double alpha = -std::expm1(-s.sigma * s.delta);
        r.rgb += (t_acc * alpha) * s.rgb;
        t_acc *= 1.0 - alpha;
    }
    r.transmittance = t_acc;
    return r;
}

std::vector<RenderSample> sample_ray(const VoxelGrid& grid, const Ray& ray, int n_samples,
                                     SplitMix64* jitter_rng) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    std::vector<RenderSample> samples;
    if (ray.degenerate()) return samples;

    const double span = ray.t_far - ray.t_near;
    const double delta = span / n_samples;
    samples.resize(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double offset = jitter_rng ? jitter_rng->next_double() : 0.5;
        RenderSample& s = samples[static_cast<std::size_t>(i)];
        s.t = ray.t_near + (i + offset) * delta;
        s.delta = delta;
        const Vec3 p = ray.origin + s.t * ray.direction;
        grid.sample(p, s.sigma, s.rgb);
    }
    return samples;
}

RenderResult render_ray(const VoxelGrid& grid, const Ray& ray, int n_samples, SplitMix64* jitter_rng) {
    const std::vector<RenderSample> samples = sample_ray(grid, ray, n_samples, jitter_rng);
    return composite(samples);
}

namespace {

// Backward pass over the compositing chain, emitting per-cell raw-parameter
// gradients through the interpolation stencils and activations. Two sweeps:
// forward for the running transmittance, backward for the rest-of-ray
// contribution R_i = sum_{j>i} alpha_j g_j prod_{i<k<j} (1 - alpha_k), which
// gives dL/dalpha_i = T_i (g_i - R_i) without dividing by (1 - alpha_i).
template <typename Sink>
void backward_impl(const VoxelGrid& grid, const Ray& ray, int n_samples, const Vec3& d_rgb,
                   SplitMix64* jitter_rng, Sink&& sink) {
    const std::vector<RenderSample> samples = sample_ray(grid, ray, n_samples, jitter_rng);
    const std::size_t n = samples.size();
    if (n == 0) return;

    std::vector<double> alpha(n), trans(n), g(n);
    double t_acc = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        alpha[i] = -std::expm1(-samples[i].sigma * samples[i].delta);
        trans[i] = t_acc;
        g[i] = dot(samples[i].rgb, d_rgb);
        t_acc *= 1.0 - alpha[i];
    }

    double rest = 0.0;  // R_i, built back to front
    for (std::size_t ii = n; ii-- > 0;) {
        const RenderSample& s = samples[ii];
        const double d_alpha = trans[ii] * (g[ii] - rest);
        const double d_sigma = d_alpha * s.delta * (1.0 - alpha[ii]);
        const double weight_c = trans[ii] * alpha[ii];  // dL/dc = weight_c * d_rgb

        const VoxelGrid::Stencil st = grid.stencil(ray.origin + s.t * ray.direction);
        for (int k = 0; k < 8; ++k) {
            const double w = st.weight[k];
            if (w == 0.0) continue;
            const std::size_t cell = st.cell[k];
            const std::size_t base = 4 * cell;
            double d[4];
            d[0] = d_sigma * w * grid.density_act_slope(cell);
            for (int ch = 0; ch < 3; ++ch) {
                const double s_act = grid.activated(base + 1 + ch);
                d[1 + ch] = weight_c * d_rgb[ch] * w * s_act * (1.0 - s_act);
            }
            sink(cell, d);
        }
        rest = alpha[ii] * g[ii] + (1.0 - alpha[ii]) * rest;
    }
}

}  // namespace

std::vector<CellGrad> render_ray_backward(const VoxelGrid& grid, const Ray& ray, int n_samples, const Vec3& d_rgb,
                                          SplitMix64* jitter_rng) {
    std::vector<CellGrad> entries;
    backward_impl(grid, ray, n_samples, d_rgb, jitter_rng, [&entries](std::size_t cell, const double d[4]) {
        CellGrad e;
        e.cell = cell;
        for (int k = 0; k < 4; ++k) e.d[k] = d[k];
        entries.push_back(e);
    });
    std::sort(entries.begin(), entries.end(), [](const CellGrad& a, const CellGrad& b) { return a.cell < b.cell; });
    std::vector<CellGrad> merged;
    merged.reserve(entries.size());
    for (const CellGrad& e : entries) {
        if (!merged.empty() && merged.back().cell == e.cell) {
            for (int k = 0; k < 4; ++k) merged.back().d[k] += e.d[k];
        } else {
            merged.push_back(e);
        }
    }
    return merged;
}

void GradAccumulator::reset() {
    for (const std::size_t cell : touched) {
        seen[cell] = 0;
        for (int k = 0; k < 4; ++k) grad[4 * cell + k] = 0.0;
    }
    touched.clear();
}

void GradAccumulator::add(std::size_t cell, const double d[4]) {
    if (!seen[cell]) {
        seen[cell] = 1;
        touched.push_back(cell);
    }
    for (int k = 0; k < 4; ++k) grad[4 * cell + k] += d[k];
}

void render_ray_backward_into(const VoxelGrid& grid, const Ray& ray, int n_samples, const Vec3& d_rgb,
                              SplitMix64* jitter_rng, GradAccumulator& acc) {
    backward_impl(grid, ray, n_samples, d_rgb, jitter_rng,
                  [&acc](std::size_t cell, const double d[4]) { acc.add(cell, d); });
}

Image render_image(const VoxelGrid& grid, const Camera& cam, int n_samples) {
    Image img(cam.width, cam.height);
    parallel_for(cam.height, [&](std::int64_t y) {
        for (int x = 0; x < cam.width; ++x) {
            const Ray ray = generate_ray(cam, x, y);
            img.set(x, static_cast<int>(y), render_ray(grid, ray, n_samples).rgb);
        }
    });
    return img;
}

}  // namespace radval
