// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>

#include "radval/dataset.hpp"
#include "radval/grid.hpp"
#include "radval/image.hpp"

namespace radval {

struct MetricConfig {
    double peak = 1.0;        // maximum possible pixel value
    double mse_floor = 1e-12; // replaces MSE below this so identical images stay finite
};

// Mean absolute per-channel difference. Means (not sums) keep values
// comparable across image sizes.
double l1_loss(const Image& a, const Image& b);

// Mean squared per-channel difference.
double mse(const Image& a, const Image& b);

// 10 * log10(peak^2 / max(mse, mse_floor)), in dB.
double psnr(const Image& a, const Image& b, const MetricConfig& cfg);
double psnr_from_mse(double mse_value, const MetricConfig& cfg);

// One validation view prepared for repeated evaluation: the camera and
// reference resampled to the valuation resolution.
struct EvalView {
    Camera camera;
    Image reference;
};

EvalView make_eval_view(const ImageRecord& rec, double resolution_scale);
std::vector<EvalView> make_eval_views(const Dataset& ds, std::span<const int> indices, double resolution_scale);

// Renders every view and returns (mean PSNR, mean L1): per-view metric, then
// the arithmetic mean across views.
std::pair<double, double> evaluate_views(const VoxelGrid& grid, std::span<const EvalView> views,
                                         const MetricConfig& cfg, int n_samples);

// Same, straight from dataset records at a given valuation resolution scale.
std::pair<double, double> validation_psnr(const VoxelGrid& grid, const Dataset& ds, std::span<const int> indices,
                                          const MetricConfig& cfg, int n_samples, double resolution_scale);

}  // namespace radval
