// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// radval: per-image contribution scoring for voxel radiance-field training.
// Subcommands: gen, value, correlate, select, retrain, report.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "radval/commands.hpp"
#include "radval/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::string mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool out_set = false;
    bool mode_set = false;
};

// Applies --seed/--out/--mode on top of the loaded config file.
radval::RunConfig resolve_config(const CommonFlags& flags) {
    radval::RunConfig cfg = radval::load_run_config(flags.config_path);
    if (flags.seed_set) cfg.train.seed = flags.seed;
    if (flags.out_set) cfg.out_dir = flags.out;
    if (flags.mode_set) cfg.train.valuation_mode = radval::valuation_mode_from_name(flags.mode);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"per-image contribution scoring for voxel radiance fields"};
    app.require_subcommand(1);

    // gen
    radval::GenArgs gen_args;
    std::string gen_corruption = "occluder";
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic posed dataset");
    gen->add_option("--spec", gen_args.spec_path, "scene spec JSON (default: built-in scene)");
    gen->add_option("--out", gen_args.out_dir, "output directory")->capture_default_str();
    gen->add_option("--seed", gen_args.seed, "generation seed")->capture_default_str();
    gen->add_option("--n-train", gen_args.options.n_train)->capture_default_str();
    gen->add_option("--n-val", gen_args.options.n_val)->capture_default_str();
    gen->add_option("--n-test", gen_args.options.n_test)->capture_default_str();
    gen->add_option("--width", gen_args.options.width)->capture_default_str();
    gen->add_option("--height", gen_args.options.height)->capture_default_str();
    gen->add_option("--corrupt-fraction", gen_args.corrupt_fraction, "fraction of train images corrupted")
        ->capture_default_str();
    gen->add_option("--corruption", gen_corruption, "occluder|noise|exposure|none")->capture_default_str();
    gen->add_option("--occluder-area", gen_args.corruption.fraction, "occluder area fraction")->capture_default_str();
    gen->add_option("--noise-sigma", gen_args.corruption.sigma)->capture_default_str();
    gen->add_option("--exposure-gain", gen_args.corruption.gain)->capture_default_str();

    // value / retrain share config flags
    CommonFlags value_flags;
    CLI::App* value = app.add_subcommand("value", "train and score every train image");
    value->add_option("--config", value_flags.config_path, "run config (INI)")->required();
    value->add_option("--seed", value_flags.seed, "overrides train.seed");
    value->add_option("--out", value_flags.out, "overrides run.out");
    value->add_option("--mode", value_flags.mode, "step_delta|revisit_delta|fixed_state");

    std::string corr_a, corr_b, corr_out = "correlation";
    CLI::App* correlate = app.add_subcommand("correlate", "compare two score files");
    correlate->add_option("scores_a", corr_a)->required();
    correlate->add_option("scores_b", corr_b)->required();
    correlate->add_option("--out", corr_out, "output directory")->capture_default_str();

    std::string sel_scores, sel_manifest, sel_out;
    double sel_threshold = 0.0;
    CLI::App* select = app.add_subcommand("select", "write a manifest of positively scored train images");
    select->add_option("scores", sel_scores)->required();
    select->add_option("--manifest", sel_manifest, "dataset manifest to filter")->required();
    select->add_option("--threshold", sel_threshold, "dv_psnr threshold (dB)")->capture_default_str();
    select->add_option("--out", sel_out, "output manifest path (default: manifest_selected.json beside input)");

    CommonFlags retrain_flags;
    std::string retrain_subset, retrain_report = "retrain_report.json";
    CLI::App* retrain = app.add_subcommand("retrain", "compare full-set vs subset training");
    retrain->add_option("--config", retrain_flags.config_path, "run config (INI)")->required();
    retrain->add_option("--subset", retrain_subset, "subset manifest from `select`")->required();
    retrain->add_option("--seed", retrain_flags.seed, "overrides train.seed");
    retrain->add_option("--report", retrain_report, "report JSON path")->capture_default_str();

    std::string report_dir;
    CLI::App* report = app.add_subcommand("report", "derive plot-ready CSVs from a value run");
    report->add_option("run_dir", report_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }
    value_flags.seed_set = value->count("--seed") > 0;
    value_flags.out_set = value->count("--out") > 0;
    value_flags.mode_set = value->count("--mode") > 0;
    retrain_flags.seed_set = retrain->count("--seed") > 0;

    try {
        if (gen->parsed()) {
            gen_args.corruption.kind = [&] {
                if (gen_corruption == "occluder") return radval::Corruption::Kind::kOccluder;
                if (gen_corruption == "noise") return radval::Corruption::Kind::kNoise;
                if (gen_corruption == "exposure") return radval::Corruption::Kind::kExposure;
                if (gen_corruption == "none") return radval::Corruption::Kind::kNone;
                throw std::invalid_argument("unknown corruption kind: " + gen_corruption);
            }();
            const std::string manifest = radval::cmd_gen(gen_args);
            std::printf("%s\n", manifest.c_str());
        } else if (value->parsed()) {
            const radval::RunConfig cfg = resolve_config(value_flags);
            const radval::ValueResult result = radval::cmd_value(cfg);
            std::printf("baseline val PSNR %.4f dB, final val PSNR %.4f dB", result.log.baseline_psnr,
                        result.final_val_psnr);
            if (result.has_test) std::printf(", test PSNR %.4f dB", result.test_psnr);
            std::printf("\nscores for %zu images under %s\n", result.scores.size(), cfg.out_dir.c_str());
        } else if (correlate->parsed()) {
            const radval::CorrelateResult r = radval::cmd_correlate(corr_a, corr_b, corr_out);
            std::printf("pearson(dv_psnr) = %.6f over %d images\n", r.pearson, r.n);
        } else if (select->parsed()) {
            if (sel_out.empty())
                sel_out = (std::filesystem::path(sel_manifest).parent_path() / "manifest_selected.json").string();
            const std::vector<int> ids = radval::cmd_select(sel_scores, sel_manifest, sel_threshold, sel_out);
            std::printf("%zu images selected -> %s\n", ids.size(), sel_out.c_str());
        } else if (retrain->parsed()) {
            radval::RunConfig cfg = radval::load_run_config(retrain_flags.config_path);
            if (retrain_flags.seed_set) cfg.train.seed = retrain_flags.seed;
            const std::vector<radval::RetrainRow> rows = radval::cmd_retrain(cfg, retrain_subset, retrain_report);
            std::printf("%-8s %10s %10s %8s\n", "variant", "val_psnr", "test_psnr", "n_train");
            for (const radval::RetrainRow& r : rows)
                std::printf("%-8s %10.4f %10.4f %8d\n", r.variant.c_str(), r.val_psnr, r.test_psnr, r.n_train);
        } else if (report->parsed()) {
            radval::cmd_report(report_dir);
            std::printf("curve.csv, histogram.csv, scatter.csv written under %s\n", report_dir.c_str());
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
