// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_OPTIMIZE_H
#define PROCAM_OPTIMIZE_H

#include <procam/autodiff.h>
#include <procam/denoise.h>
#include <procam/render.h>
#include <procam/scene.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace procam {

struct AdamSettings {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Moments for one parameter vector.
struct AdamMoments {
    std::vector<double> first, second;
};

class Adam {
public:
    explicit Adam(AdamSettings settings = {}) : s_(settings) {}

    // Advances the shared step counter; call once per optimizer step.
    void begin_step() { ++t_; }
    int step_count() const { return t_; }
    void update(std::vector<double> &x, const std::vector<double> &grad, double lr, AdamMoments &m) const;

private:
    AdamSettings s_;
    int t_ = 0;
};

struct LearningRates {
    double textures = 1e-2;   // latents of the material and normal maps
    double responses = 5e-3;  // gammas and white balance
    double pose = 1e-4;
};

struct TrainConfig {
    std::vector<SrgbImage> inputs;   // projector resolution
    std::vector<SrgbImage> targets;  // camera resolution
    int iterations = 200;
    int batch_size = 1;
    LearningRates learning_rates;
    // Cosine decay of every learning rate down to this fraction at the
    // last iteration; 1 keeps them constant.
    double final_lr_fraction = 1.0;
    double lambda_reg = 1e-2;  // TV weight on each material map
    uint64_t seed = 0;
    RenderSettings render;
    DenoiseSettings denoise;
    GradientRequest trainable = GradientRequest::all();
    // Where to write the last gradients if the loss turns non-finite.
    std::filesystem::path dump_path;
    std::function<void(int iteration, double loss)> on_iteration;
};

struct TrainResult {
    std::vector<double> loss_history;
};

// Minimizes mean L1 between denoised renders and targets plus the TV
// penalty, with Adam on the unconstrained latents. Updates scene.params
// in place. Throws ValidationError on size mismatches and NumericalError
// on a non-finite loss or gradient.
TrainResult train(Scene &scene, const TrainConfig &config);

// Render plus denoise for a novel projector input.
SrgbImage relight(const Scene &scene, const SrgbImage &projector_input, const RenderSettings &render,
                  const DenoiseSettings &denoise);

struct CompensateConfig {
    int iterations = 100;
    double learning_rate = 2e-2;
    double final_lr_fraction = 1.0;  // cosine decay as in TrainConfig
    RenderSettings render;
    DenoiseSettings denoise;
    bool warp_init = true;  // start from the target warped into projector space
    std::function<void(int iteration, double loss)> on_iteration;
};

struct CompensationResult {
    SrgbImage projector_input;
    SrgbImage rendered;  // re-render of projector_input
    std::vector<double> loss_history;
};

// Projector input whose render best matches `target` in L1.
CompensationResult compensate(const Scene &scene, const SrgbImage &target, const CompensateConfig &config);

// Target sampled at each projector pixel's surface point; projector pixels
// whose surface point the camera cannot see get `fallback`. `visible`
// (optional) receives 1 for seen pixels.
SrgbImage warp_to_projector(const Scene &scene, const SrgbImage &camera_image, double fallback,
                            std::vector<uint8_t> *visible = nullptr);

}  // namespace procam

#endif  // PROCAM_OPTIMIZE_H
