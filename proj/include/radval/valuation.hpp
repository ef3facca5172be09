// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "radval/trainer.hpp"

namespace radval {

struct LedgerEntry {
    int epoch = 0;  // 1-based
    int step = 0;
    double delta_psnr = 0.0;  // dB
    double delta_l1 = 0.0;
};

// Per-image attribution deltas, ordered by step within each image.
struct ScoreLedger {
    std::map<int, std::vector<LedgerEntry>> entries;  // image_id -> deltas
};

struct ContributionScore {
    int image_id = 0;
    double dv_psnr = 0.0;       // sum of epoch >= 2 PSNR deltas, dB
    double dv_loss = 0.0;       // sum of epoch >= 2 (-L1 deltas); higher = better
    double dv_last_epoch = 0.0; // final-epoch PSNR delta only
    int n_appearances = 0;
    bool epoch1_only = false;   // image never trained after epoch 1; scores are 0
};

// Attribution of per-step validation changes (modes step_delta and
// revisit_delta). step_delta: the change across step t belongs to the image
// trained at t, with the pre-training evaluation as the step-0 baseline.
// revisit_delta: the change between consecutive appearances of the same
// image, 0 for the first appearance. Requires a gap-free log.
ScoreLedger deltas_from_log(const StepLog& log, ValuationMode mode);

// fixed_state attribution: every step of the designated epoch was measured
// from (and reverted to) the same frozen snapshot, so each image's delta is
// its val PSNR minus the last evaluation before that epoch.
ScoreLedger fixed_state_deltas(const StepLog& log, int designated_epoch);

// Aggregates a ledger into contribution scores, excluding epoch 1. Results
// are sorted by image_id.
std::vector<ContributionScore> dv_scores(const ScoreLedger& ledger);

// Pearson product-moment correlation. Inputs must be matched pairs.
double pearson(std::span<const double> x, std::span<const double> y);

// Ids with dv_psnr above threshold, best first; ties break by ascending id.
std::vector<int> select_positive(std::span<const ContributionScore> scores, double threshold = 0.0);

// CSV `image_id,dv_psnr,dv_loss,dv_last_epoch,n_appearances`.
void save_scores(const std::string& path, std::span<const ContributionScore> scores);
std::vector<ContributionScore> load_scores(const std::string& path);

// CSV `image_id,epoch,step,delta_psnr,delta_l1`, ordered by image then step.
void save_ledger(const std::string& path, const ScoreLedger& ledger);

}  // namespace radval
