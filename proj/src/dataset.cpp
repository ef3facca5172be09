// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "radval/dataset.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace radval {

namespace fs = std::filesystem;
using nlohmann::json;

const char* split_name(Split s) {
    switch (s) {
        case Split::kTrain: return "train";
        case Split::kVal: return "val";
        default: return "test";
    }
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::kTrain;
    if (name == "val") return Split::kVal;
    if (name == "test") return Split::kTest;
    throw std::runtime_error("unknown split: " + name);
}

void Dataset::rebuild_split_lists() {
    train.clear();
    val.clear();
    test.clear();
    for (std::size_t i = 0; i < images.size(); ++i) {
        switch (images[i].split) {
            case Split::kTrain: train.push_back(static_cast<int>(i)); break;
            case Split::kVal: val.push_back(static_cast<int>(i)); break;
            case Split::kTest: test.push_back(static_cast<int>(i)); break;
        }
    }
}

namespace {

json corruption_to_json(const Corruption& c) {
    switch (c.kind) {
        case Corruption::Kind::kNone: return nullptr;
        case Corruption::Kind::kOccluder:
            return json{{"kind", "occluder"}, {"fraction", c.fraction}, {"color", {c.color.x, c.color.y, c.color.z}}};
        case Corruption::Kind::kNoise: return json{{"kind", "noise"}, {"sigma", c.sigma}};
        default: return json{{"kind", "exposure"}, {"gain", c.gain}};
    }
}

Corruption corruption_from_json(const json& j) {
    Corruption c;
    if (j.is_null()) return c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "occluder") {
        c.kind = Corruption::Kind::kOccluder;
        c.fraction = j.at("fraction").get<double>();
        const auto& col = j.at("color");
        c.color = {col.at(0).get<double>(), col.at(1).get<double>(), col.at(2).get<double>()};
    } else if (kind == "noise") {
        c.kind = Corruption::Kind::kNoise;
        c.sigma = j.at("sigma").get<double>();
    } else if (kind == "exposure") {
        c.kind = Corruption::Kind::kExposure;
        c.gain = j.at("gain").get<double>();
    } else {
        throw std::runtime_error("unknown corruption kind: " + kind);
    }
    return c;
}

json camera_to_json(const Camera& cam) {
    json rot = json::array();
    for (const double r : cam.rotation) rot.push_back(r);
    return json{{"rotation", rot},
                {"translation", {cam.translation.x, cam.translation.y, cam.translation.z}},
                {"fx", cam.fx},
                {"fy", cam.fy},
                {"cx", cam.cx},
                {"cy", cam.cy},
                {"width", cam.width},
                {"height", cam.height}};
}

Camera camera_from_json(const json& j) {
    Camera cam;
    const auto& rot = j.at("rotation");
    if (rot.size() != 9) throw std::runtime_error("camera rotation must have 9 entries");
    for (int i = 0; i < 9; ++i) cam.rotation[static_cast<std::size_t>(i)] = rot.at(i).get<double>();
    const auto& t = j.at("translation");
    cam.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    cam.validate();
    return cam;
}

}  // namespace

void save_manifest(const std::string& path, const Dataset& dataset) {
    json images = json::array();
    for (const ImageRecord& rec : dataset.images) {
        images.push_back(json{{"id", rec.id},
                              {"file", rec.file},
                              {"split", split_name(rec.split)},
                              {"corruption", corruption_to_json(rec.corruption)},
                              {"camera", camera_to_json(rec.camera)}});
    }
    const json root{{"scene", dataset.scene_path}, {"seed", dataset.seed}, {"images", images}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << root.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& manifest_path, bool load_pixels) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("bad manifest " + manifest_path + ": " + e.what());
    }

    Dataset ds;
    ds.scene_path = root.value("scene", std::string{});
    ds.seed = root.at("seed").get<std::uint64_t>();
    const fs::path base = fs::path(manifest_path).parent_path();

    std::set<int> ids;
    for (const json& j : root.at("images")) {
        ImageRecord rec;
        rec.id = j.at("id").get<int>();
        rec.file = j.at("file").get<std::string>();
        rec.split = split_from_name(j.at("split").get<std::string>());
        rec.corruption = corruption_from_json(j.at("corruption"));
        rec.camera = camera_from_json(j.at("camera"));
        if (!ids.insert(rec.id).second)
            throw std::runtime_error("duplicate image id in manifest: " + std::to_string(rec.id));
        if (rec.split != Split::kTrain && !rec.corruption.none())
            throw std::runtime_error("corruption on non-train image id " + std::to_string(rec.id));
        if (load_pixels) {
            rec.pixels = read_png((base / rec.file).string());
            if (rec.pixels.width != rec.camera.width || rec.pixels.height != rec.camera.height)
                throw std::runtime_error("image size does not match camera for id " + std::to_string(rec.id));
        }
        ds.images.push_back(std::move(rec));
    }
    ds.rebuild_split_lists();
    return ds;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png_rgb8(const std::string& path, int width, int height, const std::uint8_t* rgb) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(rgb + static_cast<std::size_t>(y) * width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png read failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    // Normalize any input to 8-bit RGB.
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * 3);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[static_cast<std::size_t>(y)] = data.data() + static_cast<std::size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return dequantize8(data.data(), width, height);
}

}  // namespace radval
