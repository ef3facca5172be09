// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radval/camera.hpp"
#include "radval/image.hpp"

namespace radval {

enum class Split { kTrain, kVal, kTest };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

// Ground-truth corruption tag. Only train images ever carry one; the tag is
// what experiments grade harmful-image detection against.
struct Corruption {
    enum class Kind { kNone, kOccluder, kNoise, kExposure };
    Kind kind = Kind::kNone;
    double fraction = 0.0;       // occluder: target area fraction in (0,1)
    Vec3 color{1.0, 0.0, 1.0};   // occluder fill color
    double sigma = 0.0;          // noise: stddev of additive Gaussian
    double gain = 1.0;           // exposure: multiplicative factor

    bool none() const { return kind == Kind::kNone; }
};

struct ImageRecord {
    int id = 0;
    std::string file;  // relative to the manifest
    Split split = Split::kTrain;
    Corruption corruption;
    Camera camera;
    Image pixels;
};

struct Dataset {
    std::string scene_path;
    std::uint64_t seed = 0;
    std::vector<ImageRecord> images;  // ordered by id
    std::vector<int> train, val, test;  // indices into images

    const ImageRecord& record(int index) const { return images[static_cast<std::size_t>(index)]; }
    void rebuild_split_lists();
};

// Manifest JSON: {scene, seed, images: [{id, file, split, corruption|null,
// camera: {rotation (9, row-major), translation (3), fx, fy, cx, cy, width,
// height}}]}. Image files are stored relative to the manifest's directory.
void save_manifest(const std::string& path, const Dataset& dataset);

// Parses the manifest and, when load_pixels is set, reads every referenced
// PNG. Validates cameras, unique ids, disjoint splits and the rule that only
// train images are corrupted.
Dataset load_dataset(const std::string& manifest_path, bool load_pixels = true);

// 8-bit RGB PNG, the dataset storage format.
void write_png_rgb8(const std::string& path, int width, int height, const std::uint8_t* rgb);
Image read_png(const std::string& path);

}  // namespace radval
