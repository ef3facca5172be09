// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radval/vec3.hpp"

namespace radval {

// Activations keeping the field well-formed for any raw value: density
// softplus(raw) >= 0, color sigmoid(raw) in [0, 1].
double softplus(double x);
double softplus_inverse(double y);  // y <= 0 maps to a raw value whose softplus underflows to 0
double sigmoid(double x);
double logit(double y);  // clamps y into (0, 1) before inverting

// Dense trainable field over the unit cube. Cell (x, y, z) sits at lattice
// position (x/(X-1), y/(Y-1), z/(Z-1)); trilinear interpolation between
// lattice points. Raw parameters are unconstrained; activated values are
// cached and kept in sync with every raw write.
//
// Parameter layout: cell index c = x + X * (y + Y * z) (z slowest), four
// parameters per cell at [4c .. 4c+3] = (density, r, g, b). The same order is
// used on disk.
class VoxelGrid {
  public:
    VoxelGrid() = default;
    VoxelGrid(const Vec3i& dims, double density_raw_init = -2.0, double rgb_raw_init = 0.0);

    const Vec3i& dims() const { return dims_; }
    std::size_t cell_count() const { return static_cast<std::size_t>(dims_.x) * dims_.y * dims_.z; }
    std::size_t param_count() const { return cell_count() * 4; }

    std::size_t cell_index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) + static_cast<std::size_t>(dims_.x) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_.y) * z);
    }

    std::span<const double> raw() const { return raw_; }
    double raw(std::size_t param) const { return raw_[param]; }
    void set_raw(std::size_t param, double value);

    // In-place parameter change for one cell; refreshes the activation cache.
    void apply_cell_delta(std::size_t cell, const double delta[4]);

    // Replaces every raw parameter at once (snapshot revert).
    void restore_raw(std::span<const double> raw);

    // Sets a cell so its activated values equal (density, rgb) up to
    // activation clamping (rgb is clamped into (0,1), density below ~1e-300
    // maps to exactly 0 after softplus).
    void set_cell_activated(int x, int y, int z, double density, const Vec3& rgb);

    double activated(std::size_t param) const { return act_[param]; }
    // d activation / d raw for the density parameter of a cell.
    double density_act_slope(std::size_t cell) const { return dslope_[cell]; }

    // Trilinear interpolation of activated values at p in [0,1]^3 (callers
    // clamp or cull; out-of-range p is clamped here). Exact at lattice points.
    void sample(const Vec3& p, double& density, Vec3& rgb) const;

    // The 8 lattice corners and weights that sample(p) blends.
    struct Stencil {
        std::size_t cell[8];
        double weight[8];
    };
    Stencil stencil(const Vec3& p) const;

    bool same_shape(const VoxelGrid& o) const { return dims_ == o.dims_; }

  private:
    void refresh(std::size_t param);

    Vec3i dims_{0, 0, 0};
    std::vector<double> raw_;     // 4 per cell
    std::vector<double> act_;     // activation(raw), same layout
    std::vector<double> dslope_;  // sigmoid(density raw) per cell
};

// "RVXG" grid file: magic RVXG, u32 version = 1, u32 X, Y, Z, then
// X*Y*Z*4 little-endian f32 raw values, cells ordered z slowest / x fastest,
// (density, r, g, b) per cell.
void save_rvxg(const std::string& path, const VoxelGrid& grid);
VoxelGrid load_rvxg(const std::string& path);

}  // namespace radval
