// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "radval/config.hpp"
#include "radval/scene.hpp"
#include "radval/valuation.hpp"

namespace radval {

// Subcommand bodies, CLI-independent so tests and experiments can drive the
// same code paths in-process. Each throws on failure: std::invalid_argument
// for bad inputs, std::runtime_error (or DivergenceError) for runtime
// failures.

struct GenArgs {
    std::string spec_path;  // empty = built-in default scene
    std::string out_dir = "data";
    std::uint64_t seed = 1;
    GenerateOptions options;
    double corrupt_fraction = 0.25;  // fraction of train images corrupted
    Corruption corruption{Corruption::Kind::kOccluder, 0.5, {1.0, 0.0, 1.0}, 0.25, 1.8};
};

// Generates a dataset; returns the manifest path.
std::string cmd_gen(const GenArgs& args);

// Fixed artifact layout under a run's output directory.
struct RunPaths {
    std::string step_log;
    std::string ledger;
    std::string scores;
    std::string checkpoint_grid;
    std::string checkpoint_state;
    std::string summary;
};
RunPaths run_paths(const std::string& out_dir);

struct ValueResult {
    StepLog log;
    std::vector<ContributionScore> scores;
    double final_val_psnr = 0.0;  // at valuation resolution
    double test_psnr = 0.0;       // native resolution; meaningful when has_test
    bool has_test = false;
};

// Trains, attributes, scores; writes steplog.csv, ledger.csv, scores.csv,
// checkpoint and run_summary.json under cfg.out_dir. The step log streams to
// disk as training runs, so a divergence abort leaves the partial log behind.
ValueResult cmd_value(const RunConfig& cfg);

struct CorrelateResult {
    int n = 0;          // images common to both score files
    double pearson = 0.0;
};

// Matches two score files by image_id and writes correlation.json plus
// scatter.csv under out_dir.
CorrelateResult cmd_correlate(const std::string& scores_a, const std::string& scores_b, const std::string& out_dir);

// Writes a manifest keeping only positively scored train images (val/test
// pass through). Returns the selected ids, best first.
std::vector<int> cmd_select(const std::string& scores_path, const std::string& manifest_path, double threshold,
                            const std::string& out_manifest);

struct RetrainRow {
    std::string variant;  // "full" or "subset"
    double val_psnr = 0.0;
    double test_psnr = 0.0;
    int n_train = 0;
};

// Trains from scratch on the full train set and on the subset manifest with
// identical config/seed; evaluates both at native resolution and writes the
// comparison to report_path (JSON).
std::vector<RetrainRow> cmd_retrain(const RunConfig& cfg, const std::string& subset_manifest,
                                    const std::string& report_path);

// Derives plot-ready curve.csv, histogram.csv and scatter.csv from a value
// run's output directory.
void cmd_report(const std::string& run_dir);

}  // namespace radval
