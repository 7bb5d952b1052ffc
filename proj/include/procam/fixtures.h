// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_FIXTURES_H
#define PROCAM_FIXTURES_H

#include <procam/image.h>
#include <procam/scene.h>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string_view>
#include <vector>

namespace procam {

// Synthetic scenes standing in for a physical projector-camera rig.
enum class FixtureKind { FlatPlane, TwoPlaneCorner, TexturedRelief };

std::string_view fixture_name(FixtureKind kind);
FixtureKind fixture_from_name(std::string_view name);  // throws std::invalid_argument

struct FixtureSpec {
    FixtureKind kind = FixtureKind::FlatPlane;
    uint64_t seed = 1;
    int train_count = 15;
    int test_count = 20;
    int camera_width = 640;
    int camera_height = 360;
    int projector_width = 800;
    int projector_height = 600;
    int spp = 256;
    int max_depth = 4;
    int texture_size = 64;
};

// Ground-truth scene. Intrinsics scale with the requested resolutions and
// the projector intensity scale is calibrated so that a white input
// slightly overexposes the camera.
std::unique_ptr<Scene> make_fixture_scene(const FixtureSpec &spec);

// Smooth procedural projector input (gradients and soft blobs); `set`
// separates the training and test streams.
enum class InputSet : uint64_t { Train = 1, Test = 2 };
SrgbImage fixture_input(const FixtureSpec &spec, InputSet set, int index);

// The usual starting point for recovery: projector gamma +0.3, white
// balance x1.2, gray matte materials, zero pose increment.
SceneParams perturbed_params(const SceneParams &truth);

// Intensity scale putting the 95th percentile of directly lit pixels
// (max over channels of exposure * w * irradiance) at 1.1.
double calibrate_intensity_scale(const Scene &scene);

struct FixtureData {
    std::unique_ptr<Scene> scene;
    std::vector<SrgbImage> train_inputs, train_targets;
    std::vector<SrgbImage> test_inputs, test_targets;
};

// Ground truth plus targets rendered at spec.spp (not denoised, not clipped).
FixtureData make_fixture(const FixtureSpec &spec);

// <dir>/truth/ (scene), <dir>/init/ (perturbed scene), <dir>/train and
// <dir>/test with input_NNN.png / target_NNN.png pairs.
void write_fixture(const FixtureData &data, const std::filesystem::path &dir);

}  // namespace procam

#endif  // PROCAM_FIXTURES_H
