// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_RENDER_H
#define PROCAM_RENDER_H

#include <procam/image.h>
#include <procam/scene.h>

#include <cstdint>
#include <memory>

namespace procam {

inline constexpr int kMaxPathDepth = 16;

struct RenderSettings {
    int spp = 16;
    int max_depth = 4;  // path vertices that receive projector light
    bool clipping_enabled = true;
    uint64_t seed = 0;
    int tile_size = 16;
    bool jitter = true;  // stratified jitter over the pixel footprint; off = pixel centers
    bool russian_roulette = false;
    bool differentiable = false;  // keep a RenderRecord for backward()
    bool serial = false;          // reference single-threaded path

    void validate() const;
};

// Noise-free guidance from one centered primary ray per pixel.
struct AuxBuffers {
    LinearImage albedo;  // base color at the primary hit
    LinearImage normal;  // shading normal
    LinearImage depth;   // hit distance along the primary ray
    LinearImage mask;    // 1 on primary hits, 0 on misses

    double depth_range() const;
};

// Everything backward() needs to replay the paths of a forward pass. The
// scene is referenced, not copied, and must not change in between.
struct RenderRecord {
    bool differentiable = false;
    const Scene *scene = nullptr;
    SrgbImage projector_input;
    RenderSettings settings;
    LinearImage irradiance;
};

struct RenderResult {
    SrgbImage image;               // camera response applied
    LinearImage irradiance;        // per-pixel mean of clipped sample contributions
    LinearImage variance_of_mean;  // sample variance / spp, per channel
    uint64_t dropped_samples = 0;  // non-finite contributions discarded
    uint64_t clipped_samples = 0;
    RenderRecord record;           // filled when settings.differentiable
};

// Path tracer with next-event estimation toward the projector pinhole.
// Throws ValidationError when the projector input does not match the
// projector resolution.
RenderResult render(const Scene &scene, const SrgbImage &projector_input, const RenderSettings &settings);

AuxBuffers render_aux(const Scene &scene, bool serial = false);

// Camera-space primary ray through a continuous pixel position, including
// the pose refinement held in the scene parameters.
Ray camera_ray(const Scene &scene, double px, double py);

// Camera intrinsics and resolution scaled by `factor` (e.g. 0.5 halves
// both the image and the focal lengths).
CameraModel scaled_camera(const CameraModel &camera, double factor);

}  // namespace procam

#endif  // PROCAM_RENDER_H
