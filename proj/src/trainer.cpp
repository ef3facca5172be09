// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace radval {

using nlohmann::json;

const char* valuation_mode_name(ValuationMode mode) {
    switch (mode) {
        case ValuationMode::kStepDelta: return "step_delta";
        case ValuationMode::kRevisitDelta: return "revisit_delta";
        case ValuationMode::kFixedState: return "fixed_state";
    }
    return "step_delta";
}

ValuationMode valuation_mode_from_name(const std::string& name) {
    if (name == "step_delta") return ValuationMode::kStepDelta;
    if (name == "revisit_delta") return ValuationMode::kRevisitDelta;
    if (name == "fixed_state") return ValuationMode::kFixedState;
    throw std::invalid_argument("unknown valuation mode: " + name);
}

void validate(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.rays_per_step < 1) throw std::invalid_argument("rays_per_step must be >= 1");
    if (cfg.n_samples_per_ray < 1) throw std::invalid_argument("n_samples_per_ray must be >= 1");
    if (!(cfg.optimizer.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (!(cfg.valuation_resolution_scale > 0.0) || cfg.valuation_resolution_scale > 1.0)
        throw std::invalid_argument("valuation_resolution_scale must be in (0, 1]");
    if (cfg.fixed_state_epoch < 0 || cfg.fixed_state_epoch > cfg.epochs)
        throw std::invalid_argument("fixed_state_epoch out of range");
}

TrainState make_initial_state(const TrainConfig& cfg) {
    TrainState st;
    st.grid = VoxelGrid(cfg.grid_dims, cfg.density_raw_init, cfg.rgb_raw_init);
    st.optimizer = Optimizer(cfg.optimizer, st.grid.cell_count());
    st.scratch = GradAccumulator(st.grid.cell_count());
    st.seed = cfg.seed;
    return st;
}

std::vector<int> epoch_schedule(std::uint64_t seed, int epoch, int n_images) {
    if (n_images < 1) throw std::invalid_argument("n_images must be >= 1");
    std::vector<int> order(static_cast<std::size_t>(n_images));
    for (int i = 0; i < n_images; ++i) order[static_cast<std::size_t>(i)] = i;
    SplitMix64 rng = derive_stream(seed, "shuffle", static_cast<std::uint64_t>(epoch));
    for (int i = n_images - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    return order;
}

std::vector<RaySample> sample_pixel_rays(const ImageRecord& image, int rays_per_step, SplitMix64& rng) {
    const int n_pixels = image.pixels.width * image.pixels.height;
    if (rays_per_step < 1) throw std::invalid_argument("rays_per_step must be >= 1");
    if (rays_per_step > n_pixels) throw std::invalid_argument("rays_per_step exceeds the image's pixel count");

    // Partial Fisher-Yates: the first rays_per_step slots are a uniform
    // without-replacement sample.
    std::vector<int> pool(static_cast<std::size_t>(n_pixels));
    for (int i = 0; i < n_pixels; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<RaySample> out;
    out.reserve(static_cast<std::size_t>(rays_per_step));
    for (int i = 0; i < rays_per_step; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_pixels - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        const int pix = pool[static_cast<std::size_t>(i)];
        RaySample s;
        s.x = pix % image.pixels.width;
        s.y = pix / image.pixels.width;
        s.target = image.pixels.at(s.x, s.y);
        s.ray = generate_ray(image.camera, s.x, s.y);
        out.push_back(s);
    }
    return out;
}

double train_step(TrainState& state, const ImageRecord& image, const TrainConfig& cfg) {
    if (image.split != Split::kTrain) throw std::invalid_argument("train_step image must be in the train split");
    if (state.scratch.grad.size() != state.grid.param_count())
        state.scratch = GradAccumulator(state.grid.cell_count());

    SplitMix64 pixel_rng = derive_stream(state.seed, "pixels", static_cast<std::uint64_t>(state.epoch),
                                         static_cast<std::uint64_t>(state.step));
    const std::vector<RaySample> rays = sample_pixel_rays(image, cfg.rays_per_step, pixel_rng);

    state.scratch.reset();
    const double inv = 1.0 / (static_cast<double>(rays.size()) * 3.0);
    double loss = 0.0;
    for (std::size_t r = 0; r < rays.size(); ++r) {
        SplitMix64 jitter = derive_stream(state.seed, "jitter", static_cast<std::uint64_t>(state.step),
                                          static_cast<std::uint64_t>(r));
        SplitMix64 jitter_back = jitter;
        const RenderResult res =
            render_ray(state.grid, rays[r].ray, cfg.n_samples_per_ray, cfg.jitter_samples ? &jitter : nullptr);
        Vec3 d_rgb;
        for (int c = 0; c < 3; ++c) {
            const double diff = res.rgb[c] - rays[r].target[c];
            loss += std::abs(diff);
            d_rgb[c] = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) * inv;
        }
        render_ray_backward_into(state.grid, rays[r].ray, cfg.n_samples_per_ray, d_rgb,
                                 cfg.jitter_samples ? &jitter_back : nullptr, state.scratch);
    }
    loss *= inv;

    state.optimizer.step(state.grid, state.scratch);
    ++state.step;
    return loss;
}

TrainResult run_training(const Dataset& ds, const TrainConfig& cfg, const TrainObserver* observer) {
    validate(cfg);
    if (ds.train.empty()) throw std::invalid_argument("dataset has no train images");
    if (ds.val.empty()) throw std::invalid_argument("dataset has no validation images");

    TrainResult out{make_initial_state(cfg), {}};
    TrainState& st = out.state;

    const std::vector<EvalView> views = make_eval_views(ds, ds.val, cfg.valuation_resolution_scale);
    const auto [base_psnr, base_l1] = evaluate_views(st.grid, views, cfg.metrics, cfg.n_samples_per_ray);
    out.log.baseline_psnr = base_psnr;
    out.log.baseline_l1 = base_l1;
    if (observer && observer->on_baseline) observer->on_baseline(base_psnr, base_l1);

    const int n = static_cast<int>(ds.train.size());
    const int designated = cfg.fixed_state_epoch == 0 ? cfg.epochs : cfg.fixed_state_epoch;

    for (int e = 1; e <= cfg.epochs; ++e) {
        st.epoch = e;
        const std::vector<int> order = epoch_schedule(cfg.seed, e, n);
        const bool frozen = cfg.valuation_mode == ValuationMode::kFixedState && e == designated;
        std::vector<double> raw_snapshot;
        Optimizer::State opt_snapshot;
        if (frozen) {
            raw_snapshot.assign(st.grid.raw().begin(), st.grid.raw().end());
            opt_snapshot = st.optimizer.snapshot();
        }
        for (int i = 0; i < n; ++i) {
            const ImageRecord& rec = ds.record(ds.train[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
            const int step_index = st.step;
            const double loss = train_step(st, rec, cfg);
            if (!std::isfinite(loss))
                throw DivergenceError("non-finite train loss at step " + std::to_string(step_index) + " (image " +
                                      std::to_string(rec.id) + "); lower the learning rate");
            StepRecord record{step_index, e, rec.id, loss, 0.0, 0.0};
            if (cfg.eval_every_step) {
                const auto [p, l1] = evaluate_views(st.grid, views, cfg.metrics, cfg.n_samples_per_ray);
                record.val_psnr = p;
                record.val_l1 = l1;
            }
            out.log.records.push_back(record);
            if (observer && observer->on_step) observer->on_step(record);
            if (cfg.eval_every_step && record.val_psnr < 0.0)
                throw DivergenceError("validation PSNR fell below 0 dB at step " + std::to_string(step_index) +
                                      "; lower the learning rate");
            if (frozen) {
                st.grid.restore_raw(raw_snapshot);
                st.optimizer.restore(opt_snapshot);
            }
        }
    }
    return out;
}

std::string step_log_header() { return "step,epoch,image_id,train_loss,val_psnr,val_l1\n"; }

std::string format_step_row(const StepRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9g,%.9g,%.9g\n", r.step, r.epoch, r.image_id, r.train_loss, r.val_psnr,
                  r.val_l1);
    return buf;
}

std::string format_baseline_row(double psnr, double l1) {
    return format_step_row(StepRecord{-1, 0, -1, 0.0, psnr, l1});
}

void save_step_log(const std::string& path, const StepLog& log) {
    std::string text = step_log_header();
    text += format_baseline_row(log.baseline_psnr, log.baseline_l1);
    for (const StepRecord& r : log.records) text += format_step_row(r);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

StepLog load_step_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open step log: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "step,epoch,image_id,train_loss,val_psnr,val_l1")
        throw std::runtime_error("bad step log header in " + path);

    StepLog log;
    bool have_baseline = false;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double v[6];
        for (int k = 0; k < 6; ++k) {
            if (!std::getline(ss, field, ',')) throw std::runtime_error(path + ": short row at line " + std::to_string(line_no));
            try {
                v[k] = std::stod(field);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": bad number at line " + std::to_string(line_no));
            }
        }
        StepRecord r{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), v[3], v[4], v[5]};
        if (r.step == -1) {
            log.baseline_psnr = r.val_psnr;
            log.baseline_l1 = r.val_l1;
            have_baseline = true;
        } else {
            log.records.push_back(r);
        }
    }
    if (!have_baseline) throw std::runtime_error(path + ": missing baseline row (step = -1)");
    return log;
}

void save_checkpoint(const std::string& grid_path, const std::string& state_path, const TrainState& state) {
    save_rvxg(grid_path, state.grid);
    const OptimizerConfig& oc = state.optimizer.config();
    const auto m1 = state.optimizer.moment1();
    const auto m2 = state.optimizer.moment2();
    const auto steps = state.optimizer.cell_steps();
    json root{{"seed", state.seed},
              {"step", state.step},
              {"epoch", state.epoch},
              {"optimizer",
               {{"kind", optimizer_name(oc.kind)},
                {"learning_rate", oc.learning_rate},
                {"beta1", oc.beta1},
                {"beta2", oc.beta2},
                {"epsilon", oc.epsilon},
                {"m1", std::vector<double>(m1.begin(), m1.end())},
                {"m2", std::vector<double>(m2.begin(), m2.end())},
                {"cell_steps", std::vector<std::uint32_t>(steps.begin(), steps.end())}}}};
    std::ofstream out(state_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + state_path);
    out << root.dump() << "\n";
}

TrainState load_checkpoint(const std::string& grid_path, const std::string& state_path) {
    std::ifstream in(state_path);
    if (!in) throw std::runtime_error("cannot open checkpoint state: " + state_path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("bad checkpoint state " + state_path + ": " + e.what());
    }

    TrainState st;
    st.grid = load_rvxg(grid_path);
    try {
        const json& jo = root.at("optimizer");
        OptimizerConfig oc;
        oc.kind = optimizer_from_name(jo.at("kind").get<std::string>());
        oc.learning_rate = jo.at("learning_rate").get<double>();
        oc.beta1 = jo.at("beta1").get<double>();
        oc.beta2 = jo.at("beta2").get<double>();
        oc.epsilon = jo.at("epsilon").get<double>();
        st.optimizer = Optimizer(oc, st.grid.cell_count());
        Optimizer::State os;
        os.m1 = jo.at("m1").get<std::vector<double>>();
        os.m2 = jo.at("m2").get<std::vector<double>>();
        os.steps = jo.at("cell_steps").get<std::vector<std::uint32_t>>();
        st.optimizer.restore(os);
        st.seed = root.at("seed").get<std::uint64_t>();
        st.step = root.at("step").get<int>();
        st.epoch = root.at("epoch").get<int>();
    } catch (const json::exception& e) {
        throw std::runtime_error("bad checkpoint state " + state_path + ": " + e.what());
    }
    st.scratch = GradAccumulator(st.grid.cell_count());
    return st;
}

}  // namespace radval
