// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace radval {

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
    if (y <= 0.0) return -1000.0;  // softplus(-1000) underflows to exactly 0
    if (y > 30.0) return y;        // exp(y) would overflow the naive form; softplus(y) == y here
    return y + std::log(-std::expm1(-y));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double y) {
    constexpr double eps = 1e-7;
    y = std::clamp(y, eps, 1.0 - eps);
    return std::log(y / (1.0 - y));
}

VoxelGrid::VoxelGrid(const Vec3i& dims, double density_raw_init, double rgb_raw_init) : dims_(dims) {
    if (dims.x < 2 || dims.y < 2 || dims.z < 2) throw std::invalid_argument("grid dims must be >= 2");
    raw_.resize(param_count());
    act_.resize(param_count());
    dslope_.resize(cell_count());
    for (std::size_t c = 0; c < cell_count(); ++c) {
        raw_[4 * c] = density_raw_init;
        raw_[4 * c + 1] = raw_[4 * c + 2] = raw_[4 * c + 3] = rgb_raw_init;
    }
    for (std::size_t p = 0; p < param_count(); ++p) refresh(p);
}

void VoxelGrid::refresh(std::size_t param) {
    if (param % 4 == 0) {
        act_[param] = softplus(raw_[param]);
        dslope_[param / 4] = sigmoid(raw_[param]);
    } else {
        act_[param] = sigmoid(raw_[param]);
    }
}

void VoxelGrid::set_raw(std::size_t param, double value) {
    raw_[param] = value;
    refresh(param);
}

void VoxelGrid::restore_raw(std::span<const double> raw) {
    if (raw.size() != raw_.size()) throw std::invalid_argument("raw parameter count mismatch");
    std::copy(raw.begin(), raw.end(), raw_.begin());
    for (std::size_t p = 0; p < param_count(); ++p) refresh(p);
}

void VoxelGrid::apply_cell_delta(std::size_t cell, const double delta[4]) {
    for (int k = 0; k < 4; ++k) {
        raw_[4 * cell + k] += delta[k];
        refresh(4 * cell + k);
    }
}

void VoxelGrid::set_cell_activated(int x, int y, int z, double density, const Vec3& rgb) {
    const std::size_t c = cell_index(x, y, z);
    set_raw(4 * c, softplus_inverse(density));
    set_raw(4 * c + 1, logit(rgb.x));
    set_raw(4 * c + 2, logit(rgb.y));
    set_raw(4 * c + 3, logit(rgb.z));
}

VoxelGrid::Stencil VoxelGrid::stencil(const Vec3& p) const {
    const double u = std::clamp(p.x, 0.0, 1.0) * (dims_.x - 1);
    const double v = std::clamp(p.y, 0.0, 1.0) * (dims_.y - 1);
    const double w = std::clamp(p.z, 0.0, 1.0) * (dims_.z - 1);
    const int ix = std::min(static_cast<int>(u), dims_.x - 2);
    const int iy = std::min(static_cast<int>(v), dims_.y - 2);
    const int iz = std::min(static_cast<int>(w), dims_.z - 2);
    const double fx = u - ix;
    const double fy = v - iy;
    const double fz = w - iz;

    Stencil s;
    int k = 0;
    for (int dz = 0; dz < 2; ++dz) {
        const double wz = dz ? fz : 1.0 - fz;
        for (int dy = 0; dy < 2; ++dy) {
            const double wy = dy ? fy : 1.0 - fy;
            for (int dx = 0; dx < 2; ++dx) {
                const double wx = dx ? fx : 1.0 - fx;
                s.cell[k] = cell_index(ix + dx, iy + dy, iz + dz);
                s.weight[k] = wx * wy * wz;
                ++k;
            }
        }
    }
    return s;
}

void VoxelGrid::sample(const Vec3& p, double& density, Vec3& rgb) const {
    const Stencil s = stencil(p);
    density = 0.0;
    rgb = {0.0, 0.0, 0.0};
    for (int k = 0; k < 8; ++k) {
        const double w = s.weight[k];
        const std::size_t base = 4 * s.cell[k];
        density += w * act_[base];
        rgb.x += w * act_[base + 1];
        rgb.y += w * act_[base + 2];
        rgb.z += w * act_[base + 3];
    }
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

static_assert(std::endian::native == std::endian::little, "RVXG writer assumes a little-endian host");

}  // namespace

void save_rvxg(const std::string& path, const VoxelGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("RVXG", 4);
    put_u32(out, 1);
    put_u32(out, static_cast<std::uint32_t>(grid.dims().x));
    put_u32(out, static_cast<std::uint32_t>(grid.dims().y));
    put_u32(out, static_cast<std::uint32_t>(grid.dims().z));
    std::vector<float> buf(grid.param_count());
    for (std::size_t p = 0; p < buf.size(); ++p) buf[p] = static_cast<float>(grid.raw(p));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

VoxelGrid load_rvxg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "RVXG", 4) != 0) throw std::runtime_error("not an RVXG file: " + path);
    const std::uint32_t version = get_u32(in);
    if (version != 1) throw std::runtime_error("unsupported RVXG version in " + path);
    const std::uint32_t x = get_u32(in);
    const std::uint32_t y = get_u32(in);
    const std::uint32_t z = get_u32(in);
    if (!in || x < 2 || y < 2 || z < 2 || static_cast<std::uint64_t>(x) * y * z > (1u << 28))
        throw std::runtime_error("bad RVXG dimensions in " + path);
    VoxelGrid grid(Vec3i{static_cast<int>(x), static_cast<int>(y), static_cast<int>(z)});
    std::vector<float> buf(grid.param_count());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated RVXG file: " + path);
    for (std::size_t p = 0; p < buf.size(); ++p) grid.set_raw(p, buf[p]);
    return grid;
}

}  // namespace radval
