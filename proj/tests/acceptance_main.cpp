// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Each criterion prints exactly one [PASS]/[FAIL] line; the
// binary exits nonzero if any criterion fails. Heavy experiment artifacts are
// computed once and shared across criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "radval/commands.hpp"
#include "radval/config.hpp"
#include "radval/valuation.hpp"

using namespace radval;
namespace fs = std::filesystem;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Shared experiment artifacts, computed on first use.
class Lab {
  public:
    Lab() {
        root_ = (fs::temp_directory_path() / "radval_acceptance").string();
        fs::remove_all(root_);
        fs::create_directories(root_);
    }

    const std::string& root() const { return root_; }

    // Default corrupted dataset: 64/8/8 at 64x64, 25% of train images with
    // 50%-area occluders.
    const std::string& corrupted_manifest() {
        if (corrupted_manifest_.empty()) {
            GenArgs args;
            args.out_dir = root_ + "/data_corrupted";
            args.seed = 1;
            corrupted_manifest_ = cmd_gen(args);
        }
        return corrupted_manifest_;
    }

    const std::string& clean_manifest() {
        if (clean_manifest_.empty()) {
            GenArgs args;
            args.out_dir = root_ + "/data_clean";
            args.seed = 1;
            args.corrupt_fraction = 0.0;
            clean_manifest_ = cmd_gen(args);
        }
        return clean_manifest_;
    }

    RunConfig base_config(const std::string& manifest, std::uint64_t seed, int rays, ValuationMode mode,
                          const std::string& out_name) {
        RunConfig cfg;
        cfg.manifest = manifest;
        cfg.out_dir = root_ + "/" + out_name;
        cfg.train.seed = seed;
        cfg.train.rays_per_step = rays;
        cfg.train.valuation_mode = mode;
        return cfg;  // everything else stays at library defaults
    }

    // Cached cmd_value over the corrupted default dataset.
    const ValueResult& value_run(std::uint64_t seed, int rays, ValuationMode mode) {
        const std::string key =
            "s" + std::to_string(seed) + "_r" + std::to_string(rays) + "_" + valuation_mode_name(mode);
        auto it = runs_.find(key);
        if (it == runs_.end()) {
            const RunConfig cfg = base_config(corrupted_manifest(), seed, rays, mode, "run_" + key);
            std::fprintf(stderr, "  [lab] value run %s...\n", key.c_str());
            it = runs_.emplace(key, cmd_value(cfg)).first;
            std::fprintf(stderr, "  [lab] value run %s done at t=%.1fs\n", key.c_str(), now_s());
        }
        return it->second;
    }

    const ValueResult& clean_run(std::uint64_t seed) {
        const std::string key = "clean_s" + std::to_string(seed);
        auto it = runs_.find(key);
        if (it == runs_.end()) {
            const RunConfig cfg =
                base_config(clean_manifest(), seed, 500, ValuationMode::kStepDelta, "run_" + key);
            std::fprintf(stderr, "  [lab] value run %s...\n", key.c_str());
            it = runs_.emplace(key, cmd_value(cfg)).first;
            std::fprintf(stderr, "  [lab] value run %s done at t=%.1fs\n", key.c_str(), now_s());
        }
        return it->second;
    }

    std::string run_dir(std::uint64_t seed, int rays, ValuationMode mode) const {
        return root_ + "/run_s" + std::to_string(seed) + "_r" + std::to_string(rays) + "_" +
               valuation_mode_name(mode);
    }

  private:
    std::string root_;
    std::string corrupted_manifest_;
    std::string clean_manifest_;
    std::map<std::string, ValueResult> runs_;
};

std::vector<double> matched_dv(const std::vector<ContributionScore>& a, const std::vector<ContributionScore>& b,
                               std::vector<double>& out_b) {
    std::map<int, double> bm;
    for (const ContributionScore& s : b) bm[s.image_id] = s.dv_psnr;
    std::vector<double> out_a;
    for (const ContributionScore& s : a) {
        const auto it = bm.find(s.image_id);
        if (it == bm.end()) continue;
        out_a.push_back(s.dv_psnr);
        out_b.push_back(it->second);
    }
    return out_a;
}

// P(score_clean > score_corrupted) with ties counted half (Mann-Whitney).
double auc_clean_over_corrupted(const std::vector<double>& clean, const std::vector<double>& corrupted) {
    double u = 0.0;
    for (const double c : clean) {
        for (const double k : corrupted) {
            if (c > k) u += 1.0;
            else if (c == k) u += 0.5;
        }
    }
    return u / (static_cast<double>(clean.size()) * static_cast<double>(corrupted.size()));
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---- criterion bodies -------------------------------------------------------

Outcome criterion_gradients() {
    SplitMix64 rng(2026);
    const double h = 1e-4;
    const double t_start = now_s();
    int cases = 0;
    int bad_components = 0;
    double worst = 0.0;
    while (cases < 100) {
        VoxelGrid g({4, 4, 4});
        for (std::size_t p = 0; p < g.param_count(); ++p)
            g.set_raw(p, p % 4 == 0 ? 0.3 + 1.2 * rng.next_gaussian() : 1.5 * rng.next_gaussian());
        Ray ray;
        {
            const Vec3 inside{0.1 + 0.8 * rng.next_double(), 0.1 + 0.8 * rng.next_double(),
                              0.1 + 0.8 * rng.next_double()};
            Vec3 dir{rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()};
            const double len = norm(dir);
            if (len < 1e-6) continue;
            dir = dir / len;
            ray.origin = inside - dir * 2.0;
            ray.direction = dir;
            if (!intersect_unit_cube(ray.origin, ray.direction, ray.t_near, ray.t_far)) continue;
        }
        const Vec3 d_rgb{rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()};
        const int n = 16;

        const std::vector<CellGrad> grads = render_ray_backward(g, ray, n, d_rgb);
        std::vector<double> dense(g.param_count(), 0.0);
        for (const CellGrad& cg : grads)
            for (int k = 0; k < 4; ++k) dense[cg.cell * 4 + static_cast<std::size_t>(k)] = cg.d[k];

        for (std::size_t p = 0; p < g.param_count(); ++p) {
            const double orig = g.raw(p);
            g.set_raw(p, orig + h);
            const double fp = dot(render_ray(g, ray, n).rgb, d_rgb);
            g.set_raw(p, orig - h);
            const double fm = dot(render_ray(g, ray, n).rgb, d_rgb);
            g.set_raw(p, orig);
            const double fd = (fp - fm) / (2.0 * h);
            const double a = dense[p];
            const double scale = std::max(std::abs(a), std::abs(fd));
            if (scale <= 1e-7) continue;  // both numerically zero
            const double rel = std::abs(a - fd) / scale;
            worst = std::max(worst, rel);
            if (rel >= 1e-4) ++bad_components;
        }
        ++cases;
    }
    const double elapsed = now_s() - t_start;
    Outcome out;
    out.pass = bad_components == 0 && elapsed < 10.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d cases, worst rel err %.2e, %d failing components, %.2fs", cases, worst,
                  bad_components, elapsed);
    out.detail = buf;
    return out;
}

Outcome criterion_metric_oracles() {
    // Fixed 2x2 fixtures with hand-computed values.
    Image a(2, 2), b(2, 2);
    const double av[12] = {0.0, 0.5, 1.0, 0.25, 0.75, 0.5, 0.125, 0.875, 0.375, 0.625, 1.0, 0.0};
    const double bv[12] = {0.1, 0.4, 0.8, 0.45, 0.75, 0.6, 0.125, 0.775, 0.575, 0.650, 0.9, 0.2};
    for (int i = 0; i < 12; ++i) {
        a.pixels[static_cast<std::size_t>(i)] = av[i];
        b.pixels[static_cast<std::size_t>(i)] = bv[i];
    }
    // Per-channel |diffs|: .1 .1 .2 .2 0 .1 0 .1 .2 .025 .1 .2 -> sum 1.325
    const double want_l1 = 1.325 / 12.0;
    // squared: 0.01 0.01 0.04 0.04 0 0.01 0 0.01 0.04 0.000625 0.01 0.04 -> 0.210625
    const double want_mse = 0.210625 / 12.0;
    const MetricConfig cfg;
    const double got_l1 = l1_loss(a, b);
    const double got_mse = mse(a, b);
    const double got_psnr = psnr(a, b, cfg);
    const double want_psnr = 10.0 * std::log10(1.0 / want_mse);
    const double psnr20 = psnr_from_mse(0.01, cfg);

    const bool pass = std::abs(got_l1 - want_l1) <= 1e-12 && std::abs(got_mse - want_mse) <= 1e-12 &&
                      std::abs(got_psnr - want_psnr) <= 1e-9 && std::abs(psnr20 - 20.0) <= 1e-9;
    char buf[200];
    std::snprintf(buf, sizeof buf, "l1 err %.1e, mse err %.1e, psnr err %.1e, PSNR(mse=0.01)=%.12g",
                  std::abs(got_l1 - want_l1), std::abs(got_mse - want_mse), std::abs(got_psnr - want_psnr), psnr20);
    return {pass, buf};
}

Outcome criterion_telescoping(Lab& lab) {
    const ValueResult& run = lab.value_run(1, 500, ValuationMode::kStepDelta);
    const ScoreLedger ledger = deltas_from_log(run.log, ValuationMode::kStepDelta);
    double sum = 0.0;
    for (const auto& [id, entries] : ledger.entries)
        for (const LedgerEntry& e : entries) sum += e.delta_psnr;
    const double want = run.log.records.back().val_psnr - run.log.baseline_psnr;
    const double err = std::abs(sum - want);
    char buf[160];
    std::snprintf(buf, sizeof buf, "sum of deltas %.9g vs total change %.9g, err %.2e dB", sum, want, err);
    return {err < 1e-6, buf};
}

Outcome criterion_determinism(Lab& lab) {
    // A compact dataset keeps this criterion quick; determinism does not
    // depend on scale.
    GenArgs args;
    args.out_dir = lab.root() + "/data_det";
    args.seed = 5;
    args.options.n_train = 8;
    args.options.n_val = 2;
    args.options.n_test = 2;
    args.options.width = 24;
    args.options.height = 24;
    args.options.bake_dims = {24, 24, 24};
    const std::string manifest = cmd_gen(args);

    RunConfig cfg;
    cfg.manifest = manifest;
    cfg.train.epochs = 2;
    cfg.train.rays_per_step = 96;
    cfg.train.n_samples_per_ray = 32;
    cfg.train.grid_dims = {16, 16, 16};
    cfg.train.seed = 7;
    cfg.out_dir = lab.root() + "/det_a";
    cmd_value(cfg);
    RunConfig cfg_b = cfg;
    cfg_b.out_dir = lab.root() + "/det_b";
    cmd_value(cfg_b);

    const RunPaths pa = run_paths(cfg.out_dir);
    const RunPaths pb = run_paths(cfg_b.out_dir);
    const bool log_equal = slurp(pa.step_log) == slurp(pb.step_log);
    const bool scores_equal = slurp(pa.scores) == slurp(pb.scores);
    char buf[120];
    std::snprintf(buf, sizeof buf, "step log byte-identical: %s, scores byte-identical: %s",
                  log_equal ? "yes" : "no", scores_equal ? "yes" : "no");
    return {log_equal && scores_equal, buf};
}

Outcome criterion_seed_reproducibility(Lab& lab) {
    const double t_start = now_s();
    std::vector<double> b500;
    const std::vector<double> a500 =
        matched_dv(lab.value_run(1, 500, ValuationMode::kStepDelta).scores,
                   lab.value_run(2, 500, ValuationMode::kStepDelta).scores, b500);
    const double corr500 = pearson(a500, b500);

    std::vector<double> b100;
    const std::vector<double> a100 =
        matched_dv(lab.value_run(1, 100, ValuationMode::kStepDelta).scores,
                   lab.value_run(2, 100, ValuationMode::kStepDelta).scores, b100);
    const double corr100 = pearson(a100, b100);
    const double elapsed = now_s() - t_start;

    const bool pass = corr500 >= 0.6 && corr100 <= corr500 && elapsed < 900.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "pearson %.3f at 500 rays (need >= 0.6), %.3f at 100 rays (must not exceed), %.0fs",
                  corr500, corr100, elapsed);
    return {pass, buf};
}

Outcome criterion_harmful_discrimination(Lab& lab) {
    const Dataset ds = load_dataset(lab.corrupted_manifest(), /*load_pixels=*/false);
    std::set<int> corrupted_ids;
    for (const int t : ds.train)
        if (!ds.record(t).corruption.none()) corrupted_ids.insert(ds.record(t).id);

    double min_auc = 1.0;
    int seeds_separated = 0;
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const ValueResult& run = lab.value_run(seed, 500, ValuationMode::kStepDelta);
        std::vector<double> clean, corrupted;
        for (const ContributionScore& s : run.scores)
            (corrupted_ids.count(s.image_id) ? corrupted : clean).push_back(s.dv_psnr);
        const double auc = auc_clean_over_corrupted(clean, corrupted);
        min_auc = std::min(min_auc, auc);
        const double mean_clean = std::accumulate(clean.begin(), clean.end(), 0.0) / clean.size();
        const double mean_corrupted =
            std::accumulate(corrupted.begin(), corrupted.end(), 0.0) / corrupted.size();
        if (mean_corrupted < mean_clean) ++seeds_separated;
    }
    const bool pass = min_auc >= 0.8 && seeds_separated == 3;
    char buf[160];
    std::snprintf(buf, sizeof buf, "min AUC %.3f over 3 seeds (need >= 0.8), mean separation %d/3", min_auc,
                  seeds_separated);
    return {pass, buf};
}

Outcome criterion_subset_benefit(Lab& lab) {
    int strictly_better = 0;
    bool never_worse = true;
    std::string gains;
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        lab.value_run(seed, 500, ValuationMode::kStepDelta);
        const std::string run_dir = lab.run_dir(seed, 500, ValuationMode::kStepDelta);
        const RunPaths paths = run_paths(run_dir);
        const std::string subset_manifest = run_dir + "/subset.json";
        cmd_select(paths.scores, lab.corrupted_manifest(), 0.0, subset_manifest);

        RunConfig cfg = lab.base_config(lab.corrupted_manifest(), seed, 500, ValuationMode::kStepDelta,
                                        "retrain_s" + std::to_string(seed));
        std::fprintf(stderr, "  [lab] retrain pair seed %llu...\n", static_cast<unsigned long long>(seed));
        const std::vector<RetrainRow> rows =
            cmd_retrain(cfg, subset_manifest, run_dir + "/retrain_report.json");
        const double full = rows[0].test_psnr;
        const double subset = rows[1].test_psnr;
        if (!(subset >= full)) never_worse = false;
        if (subset - full >= 0.2) ++strictly_better;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%+.3f", gains.empty() ? "" : "/", subset - full);
        gains += buf;
    }

    // Clean control: selection must not materially hurt an uncorrupted set.
    const ValueResult& clean_run = lab.clean_run(1);
    (void)clean_run;
    const RunPaths clean_paths = run_paths(lab.root() + "/run_clean_s1");
    const std::string clean_subset = lab.root() + "/run_clean_s1/subset.json";
    cmd_select(clean_paths.scores, lab.clean_manifest(), 0.0, clean_subset);
    RunConfig clean_cfg =
        lab.base_config(lab.clean_manifest(), 1, 500, ValuationMode::kStepDelta, "retrain_clean");
    std::fprintf(stderr, "  [lab] retrain pair clean...\n");
    const std::vector<RetrainRow> clean_rows =
        cmd_retrain(clean_cfg, clean_subset, lab.root() + "/run_clean_s1/retrain_report.json");
    const double clean_gap = clean_rows[1].test_psnr - clean_rows[0].test_psnr;

    const bool pass = never_worse && strictly_better >= 2 && clean_gap >= -0.1;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "subset-minus-full test dB %s (need all >= 0, >= +0.2 in 2/3), clean gap %+.3f (need >= -0.1)",
                  gains.c_str(), clean_gap);
    return {pass, buf};
}

Outcome criterion_fixed_state_instability(Lab& lab) {
    std::vector<double> b_step;
    const std::vector<double> a_step =
        matched_dv(lab.value_run(1, 500, ValuationMode::kStepDelta).scores,
                   lab.value_run(2, 500, ValuationMode::kStepDelta).scores, b_step);
    const double corr_step = pearson(a_step, b_step);

    std::vector<double> b_fixed;
    const std::vector<double> a_fixed =
        matched_dv(lab.value_run(1, 500, ValuationMode::kFixedState).scores,
                   lab.value_run(2, 500, ValuationMode::kFixedState).scores, b_fixed);
    const double corr_fixed = pearson(a_fixed, b_fixed);

    char buf[160];
    std::snprintf(buf, sizeof buf, "fixed_state pearson %.3f vs step_delta %.3f (must be lower)", corr_fixed,
                  corr_step);
    return {corr_fixed < corr_step, buf};
}

Outcome criterion_epoch_exclusion(Lab& lab) {
    const ValueResult& run = lab.value_run(1, 500, ValuationMode::kStepDelta);
    const ScoreLedger ledger = deltas_from_log(run.log, ValuationMode::kStepDelta);
    int max_epoch = 0;
    for (const auto& [id, entries] : ledger.entries)
        for (const LedgerEntry& e : entries) max_epoch = std::max(max_epoch, e.epoch);
    double sum_first = 0.0, sum_last = 0.0;
    int n_first = 0, n_last = 0;
    for (const auto& [id, entries] : ledger.entries) {
        for (const LedgerEntry& e : entries) {
            if (e.epoch == 1) {
                sum_first += std::abs(e.delta_psnr);
                ++n_first;
            } else if (e.epoch == max_epoch) {
                sum_last += std::abs(e.delta_psnr);
                ++n_last;
            }
        }
    }
    const double mean_first = sum_first / n_first;
    const double mean_last = sum_last / n_last;
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean |delta| epoch 1: %.4g dB vs final epoch: %.4g dB (must be larger)",
                  mean_first, mean_last);
    return {mean_first > mean_last, buf};
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)(Lab&);
    };
    Lab lab;

    const Entry entries[] = {
        {1, "gradient correctness", [](Lab&) { return criterion_gradients(); }},
        {2, "metric oracles", [](Lab&) { return criterion_metric_oracles(); }},
        {3, "telescoping accounting", [](Lab& l) { return criterion_telescoping(l); }},
        {4, "determinism of cmd_value", [](Lab& l) { return criterion_determinism(l); }},
        {5, "seed reproducibility of scores", [](Lab& l) { return criterion_seed_reproducibility(l); }},
        {6, "harmful-image discrimination", [](Lab& l) { return criterion_harmful_discrimination(l); }},
        {7, "subset-selection benefit", [](Lab& l) { return criterion_subset_benefit(l); }},
        {8, "fixed-state instability", [](Lab& l) { return criterion_fixed_state_instability(l); }},
        {9, "epoch-one exclusion effect", [](Lab& l) { return criterion_epoch_exclusion(l); }},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        Outcome out;
        try {
            out = e.fn(lab);
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] criterion %d: %s — %s\n", out.pass ? "PASS" : "FAIL", e.id, e.name, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("ACCEPTANCE: %d/9 criteria passed (%.0fs total)\n", 9 - failures, now_s());
    return failures == 0 ? 0 : 1;
}
