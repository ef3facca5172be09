// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "radval/trainer.hpp"

namespace radval {

// Everything a pipeline run needs, serialized as an INI-style file with
// [run], [train] and [metrics] sections. Unknown sections or keys are
// rejected so typos cannot silently fall back to defaults.
struct RunConfig {
    std::string manifest;      // dataset manifest path
    std::string out_dir = "out";
    TrainConfig train;
};

RunConfig parse_run_config(std::istream& in, const std::string& origin);
RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& cfg);

// Sorted `section.key=value` lines covering every field, defaults included.
// Two configs hash equal exactly when every effective setting matches.
std::string canonical_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace radval
