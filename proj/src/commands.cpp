// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "radval/metrics.hpp"

namespace radval {

namespace fs = std::filesystem;
using nlohmann::json;

std::string cmd_gen(const GenArgs& args) {
    const SceneSpec spec = args.spec_path.empty() ? default_scene() : load_scene(args.spec_path);
    fs::create_directories(args.out_dir);
    save_scene((fs::path(args.out_dir) / "scene.json").string(), spec);
    const CorruptionPlan plan =
        plan_corruption(args.options.n_train, args.corrupt_fraction, args.corruption, args.seed);
    return generate_dataset(spec, "scene.json", args.options, plan, args.seed, args.out_dir);
}

RunPaths run_paths(const std::string& out_dir) {
    const fs::path d(out_dir);
    return {(d / "steplog.csv").string(),      (d / "ledger.csv").string(),
            (d / "scores.csv").string(),       (d / "checkpoint.rvxg").string(),
            (d / "checkpoint_state.json").string(), (d / "run_summary.json").string()};
}

ValueResult cmd_value(const RunConfig& cfg) {
    if (cfg.manifest.empty()) throw std::invalid_argument("config is missing run.manifest");
    if (cfg.train.epochs < 2) throw std::invalid_argument("valuation requires >= 2 epochs");
    validate(cfg.train);

    const auto t0 = std::chrono::steady_clock::now();
    const Dataset ds = load_dataset(cfg.manifest);
    fs::create_directories(cfg.out_dir);
    const RunPaths paths = run_paths(cfg.out_dir);

    // Stream the step log so a divergence abort still leaves the rows that
    // were measured.
    std::ofstream log_out(paths.step_log, std::ios::binary);
    if (!log_out) throw std::runtime_error("cannot open for writing: " + paths.step_log);
    log_out << step_log_header();
    TrainObserver observer;
    observer.on_baseline = [&](double psnr, double l1) { log_out << format_baseline_row(psnr, l1) << std::flush; };
    observer.on_step = [&](const StepRecord& r) { log_out << format_step_row(r) << std::flush; };

    TrainResult result = run_training(ds, cfg.train, &observer);
    log_out.close();

    const int designated = cfg.train.fixed_state_epoch == 0 ? cfg.train.epochs : cfg.train.fixed_state_epoch;
    const ScoreLedger ledger = cfg.train.valuation_mode == ValuationMode::kFixedState
                                   ? fixed_state_deltas(result.log, designated)
                                   : deltas_from_log(result.log, cfg.train.valuation_mode);
    const std::vector<ContributionScore> scores = dv_scores(ledger);
    save_ledger(paths.ledger, ledger);
    save_scores(paths.scores, scores);
    save_checkpoint(paths.checkpoint_grid, paths.checkpoint_state, result.state);

    ValueResult out;
    out.log = std::move(result.log);
    out.scores = scores;
    out.final_val_psnr = out.log.records.empty() ? out.log.baseline_psnr : out.log.records.back().val_psnr;
    json summary{{"config_hash", [&] {
                      char buf[24];
                      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
                      return std::string(buf);
                  }()},
                 {"seed", cfg.train.seed},
                 {"valuation_mode", valuation_mode_name(cfg.train.valuation_mode)},
                 {"n_train", ds.train.size()},
                 {"n_steps", out.log.records.size()},
                 {"baseline_val_psnr", out.log.baseline_psnr},
                 {"final_val_psnr", out.final_val_psnr}};
    if (!ds.test.empty()) {
        const auto [tp, tl] = validation_psnr(result.state.grid, ds, ds.test, cfg.train.metrics,
                                              cfg.train.n_samples_per_ray, 1.0);
        out.test_psnr = tp;
        out.has_test = true;
        summary["test_psnr"] = tp;
        (void)tl;
    } else {
        summary["test_psnr"] = nullptr;
    }
    const auto t1 = std::chrono::steady_clock::now();
    summary["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();

    std::ofstream sum_out(paths.summary, std::ios::binary);
    if (!sum_out) throw std::runtime_error("cannot open for writing: " + paths.summary);
    sum_out << summary.dump(2) << "\n";
    return out;
}

CorrelateResult cmd_correlate(const std::string& scores_a, const std::string& scores_b, const std::string& out_dir) {
    const std::vector<ContributionScore> a = load_scores(scores_a);
    const std::vector<ContributionScore> b = load_scores(scores_b);
    std::map<int, double> by_id_b;
    for (const ContributionScore& s : b) by_id_b[s.image_id] = s.dv_psnr;

    std::vector<int> ids;
    std::vector<double> xs, ys;
    for (const ContributionScore& s : a) {
        const auto it = by_id_b.find(s.image_id);
        if (it == by_id_b.end()) continue;
        ids.push_back(s.image_id);
        xs.push_back(s.dv_psnr);
        ys.push_back(it->second);
    }
    if (ids.empty()) throw std::runtime_error("no common images between " + scores_a + " and " + scores_b);

    CorrelateResult result{static_cast<int>(ids.size()), pearson(xs, ys)};

    fs::create_directories(out_dir);
    json report{{"metric", "dv_psnr"}, {"n", result.n}, {"pearson", result.pearson}};
    std::ofstream jout(fs::path(out_dir) / "correlation.json", std::ios::binary);
    if (!jout) throw std::runtime_error("cannot write correlation.json under " + out_dir);
    jout << report.dump(2) << "\n";

    std::string text = "image_id,dv_psnr_a,dv_psnr_b\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g\n", ids[i], xs[i], ys[i]);
        text += buf;
    }
    std::ofstream cout_(fs::path(out_dir) / "scatter.csv", std::ios::binary);
    if (!cout_) throw std::runtime_error("cannot write scatter.csv under " + out_dir);
    cout_ << text;
    return result;
}

std::vector<int> cmd_select(const std::string& scores_path, const std::string& manifest_path, double threshold,
                            const std::string& out_manifest) {
    const std::vector<ContributionScore> scores = load_scores(scores_path);
    const std::vector<int> selected = select_positive(scores, threshold);
    if (selected.empty())
        throw std::runtime_error("no train image clears the selection threshold; refusing to write an empty subset");
    const std::set<int> keep(selected.begin(), selected.end());

    Dataset ds = load_dataset(manifest_path, /*load_pixels=*/false);
    const fs::path src_dir = fs::absolute(fs::path(manifest_path)).parent_path();
    const fs::path dst_dir = fs::absolute(fs::path(out_manifest)).parent_path();

    Dataset subset;
    subset.scene_path = ds.scene_path;
    subset.seed = ds.seed;
    if (src_dir != dst_dir && !subset.scene_path.empty() && !fs::path(subset.scene_path).is_absolute())
        subset.scene_path = fs::relative(src_dir / subset.scene_path, dst_dir).string();
    for (ImageRecord& rec : ds.images) {
        if (rec.split == Split::kTrain && !keep.count(rec.id)) continue;
        if (src_dir != dst_dir && !fs::path(rec.file).is_absolute())
            rec.file = fs::relative(src_dir / rec.file, dst_dir).string();
        subset.images.push_back(std::move(rec));
    }
    subset.rebuild_split_lists();
    fs::create_directories(dst_dir);
    save_manifest(out_manifest, subset);
    return selected;
}

namespace {

RetrainRow evaluate_variant(const std::string& variant, const Dataset& ds, const TrainConfig& cfg) {
    TrainConfig tc = cfg;
    tc.eval_every_step = false;  // final metrics only; the trajectory is identical
    TrainResult result = run_training(ds, tc);
    RetrainRow row;
    row.variant = variant;
    row.n_train = static_cast<int>(ds.train.size());
    row.val_psnr = validation_psnr(result.state.grid, ds, ds.val, cfg.metrics, cfg.n_samples_per_ray, 1.0).first;
    row.test_psnr = ds.test.empty()
                        ? std::numeric_limits<double>::quiet_NaN()
                        : validation_psnr(result.state.grid, ds, ds.test, cfg.metrics, cfg.n_samples_per_ray, 1.0).first;
    return row;
}

}  // namespace

std::vector<RetrainRow> cmd_retrain(const RunConfig& cfg, const std::string& subset_manifest,
                                    const std::string& report_path) {
    if (cfg.manifest.empty()) throw std::invalid_argument("config is missing run.manifest");
    validate(cfg.train);
    const Dataset full = load_dataset(cfg.manifest);
    const Dataset subset = load_dataset(subset_manifest);

    std::vector<RetrainRow> rows;
    rows.push_back(evaluate_variant("full", full, cfg.train));
    rows.push_back(evaluate_variant("subset", subset, cfg.train));

    json jrows = json::array();
    for (const RetrainRow& r : rows)
        jrows.push_back({{"variant", r.variant},
                         {"val_psnr", r.val_psnr},
                         {"test_psnr", std::isnan(r.test_psnr) ? json(nullptr) : json(r.test_psnr)},
                         {"n_train", r.n_train}});
    fs::create_directories(fs::absolute(fs::path(report_path)).parent_path());
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + report_path);
    out << json{{"rows", jrows}}.dump(2) << "\n";
    return rows;
}

void cmd_report(const std::string& run_dir) {
    const RunPaths paths = run_paths(run_dir);
    const StepLog log = load_step_log(paths.step_log);
    const std::vector<ContributionScore> scores = load_scores(paths.scores);
    if (scores.empty()) throw std::runtime_error(paths.scores + " has no rows");

    std::string curve = "step,epoch,val_psnr,val_l1\n";
    {
        char buf[120];
        std::snprintf(buf, sizeof buf, "-1,0,%.9g,%.9g\n", log.baseline_psnr, log.baseline_l1);
        curve += buf;
    }
    for (const StepRecord& r : log.records) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g\n", r.step, r.epoch, r.val_psnr, r.val_l1);
        curve += buf;
    }
    std::ofstream curve_out(fs::path(run_dir) / "curve.csv", std::ios::binary);
    if (!curve_out) throw std::runtime_error("cannot write curve.csv under " + run_dir);
    curve_out << curve;

    double lo = scores.front().dv_psnr, hi = lo;
    for (const ContributionScore& s : scores) {
        lo = std::min(lo, s.dv_psnr);
        hi = std::max(hi, s.dv_psnr);
    }
    const int n_bins = hi > lo ? 16 : 1;
    std::vector<int> counts(static_cast<std::size_t>(n_bins), 0);
    const double width = (hi - lo) / n_bins;
    for (const ContributionScore& s : scores) {
        int b = n_bins == 1 ? 0 : static_cast<int>((s.dv_psnr - lo) / width);
        b = std::clamp(b, 0, n_bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    std::string hist = "bin_lo,bin_hi,count\n";
    for (int b = 0; b < n_bins; ++b) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%d\n", lo + b * width, b + 1 == n_bins ? hi : lo + (b + 1) * width,
                      counts[static_cast<std::size_t>(b)]);
        hist += buf;
    }
    std::ofstream hist_out(fs::path(run_dir) / "histogram.csv", std::ios::binary);
    if (!hist_out) throw std::runtime_error("cannot write histogram.csv under " + run_dir);
    hist_out << hist;

    std::string scatter = "image_id,dv_psnr,dv_loss\n";
    for (const ContributionScore& s : scores) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g\n", s.image_id, s.dv_psnr, s.dv_loss);
        scatter += buf;
    }
    std::ofstream scatter_out(fs::path(run_dir) / "scatter.csv", std::ios::binary);
    if (!scatter_out) throw std::runtime_error("cannot write scatter.csv under " + run_dir);
    scatter_out << scatter;
}

}  // namespace radval
