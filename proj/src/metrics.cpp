// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radval/render.hpp"

namespace radval {

namespace {

void require_same_size(const Image& a, const Image& b) {
    if (!a.same_size(b)) throw std::invalid_argument("image dimensions differ");
    if (a.width <= 0 || a.height <= 0) throw std::invalid_argument("empty image");
}

}  // namespace

double l1_loss(const Image& a, const Image& b) {
    require_same_size(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) acc += std::abs(a.pixels[i] - b.pixels[i]);
    return acc / static_cast<double>(a.pixels.size());
}

double mse(const Image& a, const Image& b) {
    require_same_size(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.pixels.size());
}

double psnr_from_mse(double mse_value, const MetricConfig& cfg) {
    const double m = std::max(mse_value, cfg.mse_floor);
    return 10.0 * std::log10(cfg.peak * cfg.peak / m);
}

double psnr(const Image& a, const Image& b, const MetricConfig& cfg) {
    return psnr_from_mse(mse(a, b), cfg);
}

EvalView make_eval_view(const ImageRecord& rec, double resolution_scale) {
    if (!(resolution_scale > 0.0) || resolution_scale > 1.0)
        throw std::invalid_argument("resolution scale must be in (0, 1]");
    EvalView view;
    const int w = std::max(1, static_cast<int>(std::lround(rec.camera.width * resolution_scale)));
    const int h = std::max(1, static_cast<int>(std::lround(rec.camera.height * resolution_scale)));
    view.camera = rec.camera.scaled(w, h);
    view.reference = resize_area(rec.pixels, w, h);
    return view;
}

std::vector<EvalView> make_eval_views(const Dataset& ds, std::span<const int> indices, double resolution_scale) {
    std::vector<EvalView> views;
    views.reserve(indices.size());
    for (const int idx : indices) views.push_back(make_eval_view(ds.record(idx), resolution_scale));
    return views;
}

std::pair<double, double> evaluate_views(const VoxelGrid& grid, std::span<const EvalView> views,
                                         const MetricConfig& cfg, int n_samples) {
    if (views.empty()) throw std::invalid_argument("validation set is empty");
    double psnr_acc = 0.0;
    double l1_acc = 0.0;
    for (const EvalView& view : views) {
        const Image rendered = render_image(grid, view.camera, n_samples);
        psnr_acc += psnr(rendered, view.reference, cfg);
        l1_acc += l1_loss(rendered, view.reference);
    }
    const double n = static_cast<double>(views.size());
    return {psnr_acc / n, l1_acc / n};
}

std::pair<double, double> validation_psnr(const VoxelGrid& grid, const Dataset& ds, std::span<const int> indices,
                                          const MetricConfig& cfg, int n_samples, double resolution_scale) {
    const std::vector<EvalView> views = make_eval_views(ds, indices, resolution_scale);
    return evaluate_views(grid, views, cfg, n_samples);
}

}  // namespace radval
