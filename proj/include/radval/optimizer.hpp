// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radval/grid.hpp"
#include "radval/render.hpp"

namespace radval {

enum class OptimizerKind { kSgd, kAdam };

const char* optimizer_name(OptimizerKind kind);
OptimizerKind optimizer_from_name(const std::string& name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::kAdam;
    // Tuned for 32^3 grids at 64x64 supervision: the large step with a large
    // epsilon converges inside five epochs, and epsilon doubles as a step
    // damper once cells are near their optimum.
    double learning_rate = 0.35;
    double beta1 = 0.875;
    double beta2 = 0.999;
    double epsilon = 2e-6;
};

// Sparse first-order updates over the grid's raw parameters. Only cells the
// step's gradient touched move; everything else (parameters and moments) is
// left bit-identical. Adam keeps a per-cell step count for bias correction,
// so a cell's trajectory depends only on the steps that touched it.
class Optimizer {
  public:
    Optimizer() = default;
    Optimizer(const OptimizerConfig& cfg, std::size_t cell_count);

    const OptimizerConfig& config() const { return cfg_; }

    // Applies one update from the accumulated gradients, cells in ascending
    // index order.
    void step(VoxelGrid& grid, const GradAccumulator& acc);

    std::span<const double> moment1() const { return m_; }
    std::span<const double> moment2() const { return v_; }
    std::span<const std::uint32_t> cell_steps() const { return steps_; }

    // Full optimizer state, for checkpoints and for the valuation mode that
    // re-measures steps from a frozen model.
    struct State {
        std::vector<double> m1;
        std::vector<double> m2;
        std::vector<std::uint32_t> steps;
    };
    State snapshot() const { return {m_, v_, steps_}; }
    void restore(const State& state);

  private:
    OptimizerConfig cfg_;
    std::vector<double> m_;       // 4 per cell (Adam only)
    std::vector<double> v_;       // 4 per cell (Adam only)
    std::vector<std::uint32_t> steps_;  // per cell (Adam only)
};

}  // namespace radval
