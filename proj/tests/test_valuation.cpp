// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include "radval/trainer.hpp"
#include "radval/valuation.hpp"
#include "test_support.hpp"

using namespace radval;

namespace {

StepRecord rec(int step, int epoch, int image_id, double psnr, double l1 = 0.1) {
    return StepRecord{step, epoch, image_id, 0.5, psnr, l1};
}

}  // namespace

TEST_CASE("step_delta: baseline 9, then 10 and 12, credits +1 and +2") {
    StepLog log;
    log.baseline_psnr = 9.0;
    log.baseline_l1 = 0.30;
    log.records = {rec(0, 1, 7, 10.0, 0.25), rec(1, 1, 3, 12.0, 0.20)};

    const ScoreLedger ledger = deltas_from_log(log, ValuationMode::kStepDelta);
    REQUIRE(ledger.entries.count(7) == 1);
    REQUIRE(ledger.entries.count(3) == 1);
    CHECK(test::close(ledger.entries.at(7)[0].delta_psnr, 1.0, 1e-12));
    CHECK(test::close(ledger.entries.at(3)[0].delta_psnr, 2.0, 1e-12));
    CHECK(test::close(ledger.entries.at(7)[0].delta_l1, -0.05, 1e-12));
    CHECK(test::close(ledger.entries.at(3)[0].delta_l1, -0.05, 1e-12));
    CHECK(ledger.entries.at(7)[0].epoch == 1);
    CHECK(ledger.entries.at(3)[0].step == 1);
}

TEST_CASE("revisit_delta: first appearances are free, revisits span the gap") {
    StepLog log;
    log.baseline_psnr = 9.0;
    log.records = {rec(0, 1, 7, 10.0), rec(1, 1, 3, 12.0), rec(2, 2, 7, 11.5), rec(3, 2, 3, 13.0)};

    const ScoreLedger ledger = deltas_from_log(log, ValuationMode::kRevisitDelta);
    REQUIRE(ledger.entries.at(7).size() == 2);
    CHECK(ledger.entries.at(7)[0].delta_psnr == 0.0);
    CHECK(test::close(ledger.entries.at(7)[1].delta_psnr, 1.5, 1e-12));  // 11.5 - 10.0
    CHECK(ledger.entries.at(3)[0].delta_psnr == 0.0);
    CHECK(test::close(ledger.entries.at(3)[1].delta_psnr, 1.0, 1e-12));  // 13.0 - 12.0
}

TEST_CASE("a constant validation curve attributes zero everywhere") {
    StepLog log;
    log.baseline_psnr = 14.0;
    log.baseline_l1 = 0.1;
    log.records = {rec(0, 1, 0, 14.0), rec(1, 1, 1, 14.0), rec(2, 2, 0, 14.0), rec(3, 2, 1, 14.0)};
    const ScoreLedger ledger = deltas_from_log(log, ValuationMode::kStepDelta);
    for (const auto& [id, entries] : ledger.entries)
        for (const LedgerEntry& e : entries) CHECK(e.delta_psnr == 0.0);
    const std::vector<ContributionScore> scores = dv_scores(ledger);
    for (const ContributionScore& s : scores) {
        CHECK(s.dv_psnr == 0.0);
        CHECK(s.dv_loss == 0.0);
    }
}

TEST_CASE("deltas_from_log rejects gaps and the fixed_state mode") {
    StepLog log;
    log.baseline_psnr = 9.0;
    log.records = {rec(0, 1, 7, 10.0), rec(2, 1, 3, 12.0)};  // step 1 missing
    CHECK_THROWS_WITH_AS(deltas_from_log(log, ValuationMode::kStepDelta),
                         doctest::Contains("expected step 1"), std::invalid_argument);

    StepLog ok;
    ok.baseline_psnr = 9.0;
    ok.records = {rec(0, 1, 7, 10.0)};
    CHECK_THROWS_AS(deltas_from_log(ok, ValuationMode::kFixedState), std::invalid_argument);
}

TEST_CASE("dv_scores: +0.5 in epoch 1 is excluded, +0.1 - 0.05 survives") {
    ScoreLedger ledger;
    ledger.entries[4] = {{1, 0, 0.5, -0.05}, {2, 1, 0.1, -0.01}, {3, 2, -0.05, 0.005}};
    const std::vector<ContributionScore> scores = dv_scores(ledger);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].image_id == 4);
    CHECK(test::close(scores[0].dv_psnr, 0.05, 1e-12));
    CHECK(test::close(scores[0].dv_loss, 0.01 - 0.005, 1e-12));
    CHECK(test::close(scores[0].dv_last_epoch, -0.05, 1e-12));
    CHECK(scores[0].n_appearances == 3);
    CHECK(!scores[0].epoch1_only);
}

TEST_CASE("dv_scores: single-epoch ledgers are an error, epoch-1-only images score zero") {
    ScoreLedger one_epoch;
    one_epoch.entries[0] = {{1, 0, 0.5, -0.05}};
    CHECK_THROWS_WITH_AS(dv_scores(one_epoch), doctest::Contains(">= 2 epochs"), std::invalid_argument);

    ScoreLedger mixed;
    mixed.entries[0] = {{1, 0, 0.5, -0.05}, {2, 2, 0.2, -0.02}};
    mixed.entries[9] = {{1, 1, 0.7, -0.07}};  // trained only in epoch 1
    const std::vector<ContributionScore> scores = dv_scores(mixed);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0].image_id == 0);
    CHECK(scores[1].image_id == 9);
    CHECK(scores[1].epoch1_only);
    CHECK(scores[1].dv_psnr == 0.0);
    CHECK(scores[1].n_appearances == 1);
}

TEST_CASE("fixed_state_deltas measure every step against the pre-epoch state") {
    StepLog log;
    log.baseline_psnr = 9.0;
    log.baseline_l1 = 0.5;
    log.records = {rec(0, 1, 0, 10.0, 0.4), rec(1, 1, 1, 11.0, 0.3), rec(2, 2, 1, 11.4, 0.28),
                   rec(3, 2, 0, 10.9, 0.31)};
    const ScoreLedger ledger = fixed_state_deltas(log, 2);
    CHECK(test::close(ledger.entries.at(1)[0].delta_psnr, 0.4, 1e-12));   // 11.4 - 11.0
    CHECK(test::close(ledger.entries.at(0)[0].delta_psnr, -0.1, 1e-12));  // 10.9 - 11.0
    CHECK(test::close(ledger.entries.at(0)[0].delta_l1, 0.01, 1e-12));

    // Designated epoch 1 falls back to the pre-training baseline.
    const ScoreLedger first = fixed_state_deltas(log, 1);
    CHECK(test::close(first.entries.at(0)[0].delta_psnr, 1.0, 1e-12));
    CHECK(test::close(first.entries.at(1)[0].delta_psnr, 2.0, 1e-12));

    CHECK_THROWS_AS(fixed_state_deltas(log, 3), std::invalid_argument);
}

TEST_CASE("pearson: the worked example, affine invariance and guards") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> y = {1.0, 2.0, 4.0};
    CHECK(test::close(pearson(x, y), std::sqrt(27.0 / 28.0), 1e-12));
    CHECK(test::close(pearson(x, y), 0.98198, 1e-5));

    SplitMix64 rng(83);
    std::vector<double> a(20), b(20), b_affine(20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.next_gaussian();
        b[i] = rng.next_gaussian();
        b_affine[i] = 3.5 * b[i] + 1.25;
    }
    CHECK(test::close(pearson(a, b), pearson(a, b_affine), 1e-12));

    std::vector<double> neg(20);
    for (std::size_t i = 0; i < a.size(); ++i) neg[i] = -2.0 * a[i] + 3.0;
    CHECK(test::close(pearson(a, neg), -1.0, 1e-12));
    CHECK(test::close(pearson(a, a), 1.0, 1e-12));

    CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}), std::invalid_argument);
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(pearson(std::vector<double>{2.0, 2.0, 2.0}, y), std::invalid_argument);
}

TEST_CASE("select_positive keeps positive scores, best first, ties by id") {
    std::vector<ContributionScore> scores(4);
    scores[0].image_id = 5;
    scores[0].dv_psnr = 0.1;
    scores[1].image_id = 2;
    scores[1].dv_psnr = -0.1;
    scores[2].image_id = 9;
    scores[2].dv_psnr = 0.2;
    scores[3].image_id = 1;
    scores[3].dv_psnr = 0.1;  // ties with id 5
    CHECK(select_positive(scores) == std::vector<int>{9, 1, 5});
    CHECK(select_positive(scores, 0.15) == std::vector<int>{9});
    CHECK(select_positive(scores, 9.0).empty());
    CHECK(select_positive({}).empty());
}

TEST_CASE("scores csv round trip and ledger csv shape") {
    const std::string dir = test::scratch_dir("scores");
    std::vector<ContributionScore> scores(2);
    scores[0] = {3, 0.125, -0.0625, 0.03125, 4, false};
    scores[1] = {8, -0.5, 0.25, -0.125, 2, false};
    save_scores(dir + "/scores.csv", scores);
    const std::vector<ContributionScore> back = load_scores(dir + "/scores.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].image_id == 3);
    CHECK(back[0].dv_psnr == 0.125);
    CHECK(back[0].dv_loss == -0.0625);
    CHECK(back[0].dv_last_epoch == 0.03125);
    CHECK(back[0].n_appearances == 4);
    CHECK(back[1].image_id == 8);

    ScoreLedger ledger;
    ledger.entries[3] = {{1, 0, 0.5, -0.05}, {2, 2, 0.25, -0.02}};
    save_ledger(dir + "/ledger.csv", ledger);
    std::ifstream in(dir + "/ledger.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "image_id,epoch,step,delta_psnr,delta_l1");
    std::getline(in, line);
    CHECK(line == "3,1,0,0.5,-0.05");
    std::getline(in, line);
    CHECK(line == "3,2,2,0.25,-0.02");
}

TEST_CASE("step deltas telescope back to the full validation change") {
    // On a real training run the per-step deltas are exact differences, so
    // their sum must reproduce final minus baseline.
    VoxelGrid teacher({8, 8, 8}, -1000.0, 0.0);
    for (int z = 2; z < 6; ++z)
        for (int y = 2; y < 6; ++y)
            for (int x = 3; x < 7; ++x) teacher.set_cell_activated(x, y, z, 6.0, {0.8, 0.35, 0.2});
    Dataset ds;
    for (int i = 0; i < 4; ++i) {
        const double ang = 2.0 * std::numbers::pi * i / 4.0;
        ImageRecord r;
        r.id = i;
        r.split = i < 3 ? Split::kTrain : Split::kVal;
        r.camera = look_at_camera({0.5 + 2.0 * std::cos(ang), 1.0, 0.5 + 2.0 * std::sin(ang)}, {0.5, 0.5, 0.5},
                                  9.6, 8, 8);
        r.pixels = render_image(teacher, r.camera, 32);
        ds.images.push_back(r);
    }
    ds.rebuild_split_lists();

    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.rays_per_step = 24;
    cfg.n_samples_per_ray = 16;
    cfg.grid_dims = {8, 8, 8};
    cfg.valuation_resolution_scale = 1.0;
    cfg.seed = 9;
    const TrainResult res = run_training(ds, cfg);

    const ScoreLedger ledger = deltas_from_log(res.log, ValuationMode::kStepDelta);
    double sum_psnr = 0.0;
    double sum_l1 = 0.0;
    int n_entries = 0;
    for (const auto& [id, entries] : ledger.entries) {
        for (const LedgerEntry& e : entries) {
            sum_psnr += e.delta_psnr;
            sum_l1 += e.delta_l1;
            ++n_entries;
        }
    }
    CHECK(n_entries == 9);
    const double want_psnr = res.log.records.back().val_psnr - res.log.baseline_psnr;
    const double want_l1 = res.log.records.back().val_l1 - res.log.baseline_l1;
    CHECK(test::close(sum_psnr, want_psnr, 1e-6));
    CHECK(test::close(sum_l1, want_l1, 1e-9));

    // And dv_scores on the same run: every train image appears 3 times.
    const std::vector<ContributionScore> scores = dv_scores(ledger);
    REQUIRE(scores.size() == 3);
    for (const ContributionScore& s : scores) CHECK(s.n_appearances == 3);
}
