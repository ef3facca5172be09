// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "radval/render.hpp"

namespace radval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool contains(const Primitive& prim, const Vec3& p) {
    if (prim.shape == Primitive::Shape::kSphere) {
        const Vec3 d = p - prim.center;
        return dot(d, d) <= prim.size.x * prim.size.x;
    }
    return std::abs(p.x - prim.center.x) <= prim.size.x && std::abs(p.y - prim.center.y) <= prim.size.y &&
           std::abs(p.z - prim.center.z) <= prim.size.z;
}

}  // namespace

void sample_scene(const SceneSpec& spec, const Vec3& p, double& density, Vec3& rgb) {
    density = 0.0;
    rgb = {0.0, 0.0, 0.0};
    if (spec.background) {
        const Background& bg = *spec.background;
        const double s = std::clamp(p[bg.axis], 0.0, 1.0);
        density = bg.density;
        rgb = bg.rgb_lo * (1.0 - s) + bg.rgb_hi * s;
    }
    for (const Primitive& prim : spec.primitives) {
        if (contains(prim, p)) {
            density = prim.density;
            rgb = prim.rgb;
        }
    }
}

SceneSpec default_scene() {
    SceneSpec spec;
    // Densities sized so occupied cells are a short walk from the raw init:
    // solid-looking surfaces without a long optimization climb.
    spec.primitives.push_back({Primitive::Shape::kBox, {0.50, 0.10, 0.50}, {0.45, 0.08, 0.45}, 10.0, {0.62, 0.58, 0.52}});
    spec.primitives.push_back({Primitive::Shape::kSphere, {0.40, 0.42, 0.48}, {0.23, 0, 0}, 12.0, {0.85, 0.25, 0.20}});
    spec.primitives.push_back({Primitive::Shape::kBox, {0.70, 0.38, 0.64}, {0.13, 0.22, 0.13}, 12.0, {0.20, 0.35, 0.85}});
    spec.primitives.push_back({Primitive::Shape::kSphere, {0.36, 0.76, 0.32}, {0.15, 0, 0}, 12.0, {0.25, 0.80, 0.30}});
    spec.primitives.push_back({Primitive::Shape::kBox, {0.24, 0.26, 0.74}, {0.12, 0.11, 0.12}, 11.0, {0.88, 0.80, 0.25}});
    return spec;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

SceneSpec load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("bad scene file " + path + ": " + e.what());
    }
    SceneSpec spec;
    if (root.contains("background") && !root.at("background").is_null()) {
        const json& b = root.at("background");
        Background bg;
        bg.density = b.at("density").get<double>();
        bg.rgb_lo = vec3_from_json(b.at("rgb_lo"));
        bg.rgb_hi = vec3_from_json(b.at("rgb_hi"));
        bg.axis = b.value("axis", 1);
        if (bg.axis < 0 || bg.axis > 2) throw std::runtime_error("background axis must be 0, 1 or 2");
        spec.background = bg;
    }
    for (const json& p : root.at("primitives")) {
        Primitive prim;
        const std::string shape = p.at("type").get<std::string>();
        prim.center = vec3_from_json(p.at("center"));
        if (shape == "sphere") {
            prim.shape = Primitive::Shape::kSphere;
            prim.size = {p.at("radius").get<double>(), 0.0, 0.0};
        } else if (shape == "box") {
            prim.shape = Primitive::Shape::kBox;
            prim.size = vec3_from_json(p.at("half_size"));
        } else {
            throw std::runtime_error("unknown primitive type: " + shape);
        }
        prim.density = p.at("density").get<double>();
        prim.rgb = vec3_from_json(p.at("rgb"));
        if (prim.density < 0.0) throw std::runtime_error("primitive density must be >= 0");
        spec.primitives.push_back(prim);
    }
    return spec;
}

void save_scene(const std::string& path, const SceneSpec& spec) {
    json root;
    if (spec.background) {
        root["background"] = json{{"density", spec.background->density},
                                  {"rgb_lo", vec3_to_json(spec.background->rgb_lo)},
                                  {"rgb_hi", vec3_to_json(spec.background->rgb_hi)},
                                  {"axis", spec.background->axis}};
    } else {
        root["background"] = nullptr;
    }
    json prims = json::array();
    for (const Primitive& p : spec.primitives) {
        json jp{{"center", vec3_to_json(p.center)}, {"density", p.density}, {"rgb", vec3_to_json(p.rgb)}};
        if (p.shape == Primitive::Shape::kSphere) {
            jp["type"] = "sphere";
            jp["radius"] = p.size.x;
        } else {
            jp["type"] = "box";
            jp["half_size"] = vec3_to_json(p.size);
        }
        prims.push_back(jp);
    }
    root["primitives"] = prims;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << root.dump(2) << "\n";
}

VoxelGrid bake_scene(const SceneSpec& spec, const Vec3i& dims) {
    VoxelGrid grid(dims);
    for (int z = 0; z < dims.z; ++z) {
        for (int y = 0; y < dims.y; ++y) {
            for (int x = 0; x < dims.x; ++x) {
                const Vec3 p{static_cast<double>(x) / (dims.x - 1), static_cast<double>(y) / (dims.y - 1),
                             static_cast<double>(z) / (dims.z - 1)};
                double density;
                Vec3 rgb;
                sample_scene(spec, p, density, rgb);
                grid.set_cell_activated(x, y, z, density, rgb);
            }
        }
    }
    return grid;
}

std::vector<Camera> sample_cameras(int n, SplitMix64& rng, double radius_min, double radius_max,
                                   const Vec3& look_at, int width, int height, double zoom_min,
                                   double zoom_max) {
    if (n < 1) throw std::invalid_argument("camera count must be >= 1");
    if (!(radius_min > 0.0) || radius_max < radius_min) throw std::invalid_argument("bad radius range");
    if (!(zoom_min > 0.0) || zoom_max < zoom_min) throw std::invalid_argument("bad zoom range");
    std::vector<Camera> cams;
    cams.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Elevation limited to keep the up hint non-degenerate.
        const double elev = -0.55 + 1.40 * rng.next_double();
        const double phi = 2.0 * std::numbers::pi * rng.next_double();
        const double rho = radius_min + (radius_max - radius_min) * rng.next_double();
        const double c = std::sqrt(std::max(0.0, 1.0 - elev * elev));
        const Vec3 dir{c * std::cos(phi), elev, c * std::sin(phi)};
        const Vec3 eye = look_at + rho * dir;
        // Base framing puts the central ~0.8 of the unit cube in frame
        // (tan(half fov) = 0.8 / rho); the log-uniform zoom then varies how
        // much of the frame the scene fills, so views differ in information
        // content the way uncurated captures do.
        const double zoom = std::exp(std::log(zoom_min) + std::log(zoom_max / zoom_min) * rng.next_double());
        const double focal = 0.625 * width * rho * zoom;
        cams.push_back(look_at_camera(eye, look_at, focal, width, height));
    }
    return cams;
}

Image corrupt(const Image& image, const Corruption& corruption, SplitMix64& rng) {
    Image out = image;
    switch (corruption.kind) {
        case Corruption::Kind::kNone:
            break;
        case Corruption::Kind::kOccluder: {
            if (!(corruption.fraction > 0.0) || corruption.fraction >= 1.0)
                throw std::invalid_argument("occluder fraction must be in (0, 1)");
            const int w_img = image.width;
            const int h_img = image.height;
            const double area = corruption.fraction * w_img * h_img;
            const int w_min = std::max(1, static_cast<int>(std::ceil(area / h_img)));
            const int w_max = std::min(w_img, std::max(w_min, static_cast<int>(area)));
            const int w = w_min + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w_max - w_min + 1)));
            const int h = std::clamp(static_cast<int>(std::lround(area / w)), 1, h_img);
            const int x0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w_img - w + 1)));
            const int y0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h_img - h + 1)));
            for (int y = y0; y < y0 + h; ++y)
                for (int x = x0; x < x0 + w; ++x) out.set(x, y, corruption.color);
            break;
        }
        case Corruption::Kind::kNoise: {
            if (!(corruption.sigma > 0.0)) throw std::invalid_argument("noise sigma must be > 0");
            for (double& v : out.pixels) v = std::clamp(v + corruption.sigma * rng.next_gaussian(), 0.0, 1.0);
            break;
        }
        case Corruption::Kind::kExposure: {
            if (!(corruption.gain > 0.0)) throw std::invalid_argument("exposure gain must be > 0");
            for (double& v : out.pixels) v = std::clamp(v * corruption.gain, 0.0, 1.0);
            break;
        }
    }
    return out;
}

CorruptionPlan plan_corruption(int n_train, double fraction, const Corruption& tmpl, std::uint64_t seed) {
    CorruptionPlan plan;
    if (fraction < 0.0 || fraction > 1.0) throw std::invalid_argument("corrupt fraction must be in [0, 1]");
    if (tmpl.none() || fraction == 0.0) return plan;
    const int n_corrupt = std::min(n_train, static_cast<int>(std::lround(fraction * n_train)));
    std::vector<int> ids(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i) ids[static_cast<std::size_t>(i)] = i;
    SplitMix64 rng = derive_stream(seed, "corrupt-assign");
    for (int i = 0; i < n_corrupt; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_train - i)));
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
        plan.entries.emplace_back(ids[static_cast<std::size_t>(i)], tmpl);
    }
    std::sort(plan.entries.begin(), plan.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return plan;
}

std::string generate_dataset(const SceneSpec& spec, const std::string& scene_path, const GenerateOptions& opts,
                             const CorruptionPlan& plan, std::uint64_t seed, const std::string& out_dir) {
    if (opts.n_train < 1 || opts.n_val < 1 || opts.n_test < 1)
        throw std::invalid_argument("split sizes must be >= 1");

    fs::create_directories(fs::path(out_dir) / "images");

    const VoxelGrid baked = bake_scene(spec, opts.bake_dims);
    const int n_total = opts.n_train + opts.n_val + opts.n_test;
    SplitMix64 cam_rng = derive_stream(seed, "cameras");
    // Train views carry the zoom spread; val/test views use neutral framing
    // so the benchmark weights the whole scene uniformly.
    std::vector<Camera> cams = sample_cameras(opts.n_train, cam_rng, opts.radius_min, opts.radius_max,
                                              {0.5, 0.5, 0.5}, opts.width, opts.height, opts.zoom_min, opts.zoom_max);
    const std::vector<Camera> eval_cams =
        sample_cameras(opts.n_val + opts.n_test, cam_rng, opts.radius_min, opts.radius_max, {0.5, 0.5, 0.5},
                       opts.width, opts.height, 1.0, 1.0);
    cams.insert(cams.end(), eval_cams.begin(), eval_cams.end());

    Dataset ds;
    ds.scene_path = scene_path;
    ds.seed = seed;
    for (int id = 0; id < n_total; ++id) {
        ImageRecord rec;
        rec.id = id;
        rec.split = id < opts.n_train ? Split::kTrain : (id < opts.n_train + opts.n_val ? Split::kVal : Split::kTest);
        rec.camera = cams[static_cast<std::size_t>(id)];

        char name[64];
        std::snprintf(name, sizeof name, "images/%s_%03d.png", split_name(rec.split), id);
        rec.file = name;

        Image img = render_image(baked, rec.camera, opts.n_samples);
        if (rec.split == Split::kTrain) {
            for (const auto& [cid, c] : plan.entries) {
                if (cid == id) {
                    SplitMix64 crng = derive_stream(seed, "corrupt", static_cast<std::uint64_t>(id));
                    img = corrupt(img, c, crng);
                    rec.corruption = c;
                    break;
                }
            }
        }
        const std::vector<std::uint8_t> bytes = quantize8(img);
        write_png_rgb8((fs::path(out_dir) / rec.file).string(), img.width, img.height, bytes.data());
        ds.images.push_back(std::move(rec));
    }
    ds.rebuild_split_lists();

    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    save_manifest(manifest_path, ds);
    return manifest_path;
}

}  // namespace radval
