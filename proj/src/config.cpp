// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "radval/rng.hpp"

namespace radval {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad(const std::string& origin, int line, const std::string& what) {
    throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + what);
}

// The trailing-characters check must sit outside the try: bad() throws the
// same type the catch handles.
double parse_double(const std::string& v, const std::string& origin, int line) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::invalid_argument&) {
        bad(origin, line, "expected a number, got '" + v + "'");
    } catch (const std::out_of_range&) {
        bad(origin, line, "number out of range: '" + v + "'");
    }
    if (used != v.size()) bad(origin, line, "trailing characters in number '" + v + "'");
    return d;
}

int parse_int(const std::string& v, const std::string& origin, int line) {
    std::size_t used = 0;
    int i = 0;
    try {
        i = std::stoi(v, &used);
    } catch (const std::invalid_argument&) {
        bad(origin, line, "expected an integer, got '" + v + "'");
    } catch (const std::out_of_range&) {
        bad(origin, line, "integer out of range: '" + v + "'");
    }
    if (used != v.size()) bad(origin, line, "trailing characters in integer '" + v + "'");
    return i;
}

std::uint64_t parse_u64(const std::string& v, const std::string& origin, int line) {
    std::size_t used = 0;
    unsigned long long u = 0;
    try {
        u = std::stoull(v, &used);
    } catch (const std::exception&) {
        bad(origin, line, "expected an unsigned integer, got '" + v + "'");
    }
    if (used != v.size()) bad(origin, line, "trailing characters in integer '" + v + "'");
    return u;
}

bool parse_bool(const std::string& v, const std::string& origin, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad(origin, line, "expected true/false, got '" + v + "'");
}

Vec3i parse_dims(const std::string& v, const std::string& origin, int line) {
    std::istringstream ss(v);
    Vec3i d;
    if (!(ss >> d.x >> d.y >> d.z)) bad(origin, line, "grid_dims needs three integers, got '" + v + "'");
    std::string rest;
    if (ss >> rest) bad(origin, line, "grid_dims needs exactly three integers");
    return d;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& origin) {
    RunConfig cfg;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') bad(origin, line_no, "unterminated section header");
            section = t.substr(1, t.size() - 2);
            if (section != "run" && section != "train" && section != "metrics")
                bad(origin, line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) bad(origin, line_no, "expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty()) bad(origin, line_no, "key '" + key + "' appears before any section");

        if (section == "run") {
            if (key == "manifest") cfg.manifest = value;
            else if (key == "out") cfg.out_dir = value;
            else bad(origin, line_no, "unknown key 'run." + key + "'");
        } else if (section == "train") {
            TrainConfig& tc = cfg.train;
            if (key == "epochs") tc.epochs = parse_int(value, origin, line_no);
            else if (key == "rays_per_step") tc.rays_per_step = parse_int(value, origin, line_no);
            else if (key == "learning_rate") tc.optimizer.learning_rate = parse_double(value, origin, line_no);
            else if (key == "optimizer") {
                try {
                    tc.optimizer.kind = optimizer_from_name(value);
                } catch (const std::invalid_argument& e) {
                    bad(origin, line_no, e.what());
                }
            } else if (key == "beta1") tc.optimizer.beta1 = parse_double(value, origin, line_no);
            else if (key == "beta2") tc.optimizer.beta2 = parse_double(value, origin, line_no);
            else if (key == "epsilon") tc.optimizer.epsilon = parse_double(value, origin, line_no);
            else if (key == "n_samples_per_ray") tc.n_samples_per_ray = parse_int(value, origin, line_no);
            else if (key == "seed") tc.seed = parse_u64(value, origin, line_no);
            else if (key == "eval_every_step") tc.eval_every_step = parse_bool(value, origin, line_no);
            else if (key == "valuation_mode") {
                try {
                    tc.valuation_mode = valuation_mode_from_name(value);
                } catch (const std::invalid_argument& e) {
                    bad(origin, line_no, e.what());
                }
            } else if (key == "valuation_resolution_scale") tc.valuation_resolution_scale = parse_double(value, origin, line_no);
            else if (key == "jitter_samples") tc.jitter_samples = parse_bool(value, origin, line_no);
            else if (key == "grid_dims") tc.grid_dims = parse_dims(value, origin, line_no);
            else if (key == "density_raw_init") tc.density_raw_init = parse_double(value, origin, line_no);
            else if (key == "rgb_raw_init") tc.rgb_raw_init = parse_double(value, origin, line_no);
            else if (key == "fixed_state_epoch") tc.fixed_state_epoch = parse_int(value, origin, line_no);
            else bad(origin, line_no, "unknown key 'train." + key + "'");
        } else {
            if (key == "peak") cfg.train.metrics.peak = parse_double(value, origin, line_no);
            else if (key == "mse_floor") cfg.train.metrics.mse_floor = parse_double(value, origin, line_no);
            else bad(origin, line_no, "unknown key 'metrics." + key + "'");
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    return parse_run_config(in, path);
}

void save_run_config(const std::string& path, const RunConfig& cfg) {
    const TrainConfig& tc = cfg.train;
    std::ostringstream out;
    out << "[run]\n"
        << "manifest = " << cfg.manifest << "\n"
        << "out = " << cfg.out_dir << "\n\n"
        << "[train]\n"
        << "epochs = " << tc.epochs << "\n"
        << "rays_per_step = " << tc.rays_per_step << "\n"
        << "learning_rate = " << fmt_double(tc.optimizer.learning_rate) << "\n"
        << "optimizer = " << optimizer_name(tc.optimizer.kind) << "\n"
        << "beta1 = " << fmt_double(tc.optimizer.beta1) << "\n"
        << "beta2 = " << fmt_double(tc.optimizer.beta2) << "\n"
        << "epsilon = " << fmt_double(tc.optimizer.epsilon) << "\n"
        << "n_samples_per_ray = " << tc.n_samples_per_ray << "\n"
        << "seed = " << tc.seed << "\n"
        << "eval_every_step = " << (tc.eval_every_step ? "true" : "false") << "\n"
        << "valuation_mode = " << valuation_mode_name(tc.valuation_mode) << "\n"
        << "valuation_resolution_scale = " << fmt_double(tc.valuation_resolution_scale) << "\n"
        << "jitter_samples = " << (tc.jitter_samples ? "true" : "false") << "\n"
        << "grid_dims = " << tc.grid_dims.x << " " << tc.grid_dims.y << " " << tc.grid_dims.z << "\n"
        << "density_raw_init = " << fmt_double(tc.density_raw_init) << "\n"
        << "rgb_raw_init = " << fmt_double(tc.rgb_raw_init) << "\n"
        << "fixed_state_epoch = " << tc.fixed_state_epoch << "\n\n"
        << "[metrics]\n"
        << "peak = " << fmt_double(tc.metrics.peak) << "\n"
        << "mse_floor = " << fmt_double(tc.metrics.mse_floor) << "\n";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << out.str();
}

std::string canonical_config(const RunConfig& cfg) {
    const TrainConfig& tc = cfg.train;
    std::vector<std::string> lines{
        "metrics.mse_floor=" + fmt_double(tc.metrics.mse_floor),
        "metrics.peak=" + fmt_double(tc.metrics.peak),
        "run.manifest=" + cfg.manifest,
        "run.out=" + cfg.out_dir,
        "train.beta1=" + fmt_double(tc.optimizer.beta1),
        "train.beta2=" + fmt_double(tc.optimizer.beta2),
        "train.density_raw_init=" + fmt_double(tc.density_raw_init),
        "train.epochs=" + std::to_string(tc.epochs),
        "train.epsilon=" + fmt_double(tc.optimizer.epsilon),
        "train.eval_every_step=" + std::string(tc.eval_every_step ? "true" : "false"),
        "train.fixed_state_epoch=" + std::to_string(tc.fixed_state_epoch),
        "train.grid_dims=" + std::to_string(tc.grid_dims.x) + " " + std::to_string(tc.grid_dims.y) + " " +
            std::to_string(tc.grid_dims.z),
        "train.jitter_samples=" + std::string(tc.jitter_samples ? "true" : "false"),
        "train.learning_rate=" + fmt_double(tc.optimizer.learning_rate),
        "train.n_samples_per_ray=" + std::to_string(tc.n_samples_per_ray),
        "train.optimizer=" + std::string(optimizer_name(tc.optimizer.kind)),
        "train.rays_per_step=" + std::to_string(tc.rays_per_step),
        "train.rgb_raw_init=" + fmt_double(tc.rgb_raw_init),
        "train.seed=" + std::to_string(tc.seed),
        "train.valuation_mode=" + std::string(valuation_mode_name(tc.valuation_mode)),
        "train.valuation_resolution_scale=" + fmt_double(tc.valuation_resolution_scale),
    };
    std::string text;
    for (const std::string& l : lines) {
        text += l;
        text += '\n';
    }
    return text;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(canonical_config(cfg)); }

}  // namespace radval
