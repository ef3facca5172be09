// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radval {

const char* optimizer_name(OptimizerKind kind) { return kind == OptimizerKind::kSgd ? "sgd" : "adam"; }

OptimizerKind optimizer_from_name(const std::string& name) {
    if (name == "sgd") return OptimizerKind::kSgd;
    if (name == "adam") return OptimizerKind::kAdam;
    throw std::invalid_argument("unknown optimizer: " + name);
}

Optimizer::Optimizer(const OptimizerConfig& cfg, std::size_t cell_count) : cfg_(cfg) {
    // lr = 0 is a valid null update (run-level validation is stricter).
    if (!(cfg.learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
    if (cfg.kind == OptimizerKind::kAdam) {
        if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
            throw std::invalid_argument("Adam betas must be in [0, 1)");
        if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be > 0");
        m_.assign(cell_count * 4, 0.0);
        v_.assign(cell_count * 4, 0.0);
        steps_.assign(cell_count, 0);
    }
}

void Optimizer::step(VoxelGrid& grid, const GradAccumulator& acc) {
    std::vector<std::size_t> cells(acc.touched);
    std::sort(cells.begin(), cells.end());

    const double lr = cfg_.learning_rate;
    for (const std::size_t cell : cells) {
        const double* g = &acc.grad[cell * 4];
        double delta[4];
        if (cfg_.kind == OptimizerKind::kSgd) {
            for (int k = 0; k < 4; ++k) delta[k] = -lr * g[k];
        } else {
            const std::uint32_t t = ++steps_[cell];
            const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t));
            for (int k = 0; k < 4; ++k) {
                double& m = m_[cell * 4 + k];
                double& v = v_[cell * 4 + k];
                m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g[k];
                v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g[k] * g[k];
                delta[k] = -lr * (m / bc1) / (std::sqrt(v / bc2) + cfg_.epsilon);
            }
        }
        grid.apply_cell_delta(cell, delta);
    }
}

void Optimizer::restore(const State& state) {
    if (cfg_.kind == OptimizerKind::kAdam) {
        if (state.m1.size() != m_.size() || state.m2.size() != v_.size() || state.steps.size() != steps_.size())
            throw std::invalid_argument("optimizer state size mismatch");
    }
    m_ = state.m1;
    v_ = state.m2;
    steps_ = state.steps;
}

}  // namespace radval
