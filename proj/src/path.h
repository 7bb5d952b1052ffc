// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

// Path construction shared by the forward renderer and the adjoint
// replay. Both must consume random numbers in exactly the same order.

#ifndef PROCAM_SRC_PATH_H
#define PROCAM_SRC_PATH_H

#include <procam/brdf.h>
#include <procam/geometry.h>
#include <procam/render.h>
#include <procam/rng.h>
#include <procam/scene.h>

#include <array>

namespace procam::path {

struct Context {
    const Scene *scene = nullptr;
    const SrgbImage *input = nullptr;
    const RenderSettings *settings = nullptr;
    Mat3 camera_rotation_t;  // R_c^T
    Vec3 camera_origin;
    Mat3 camera_k_inv;
    Vec3 projector_center;
    Vec3 projector_gamma;
    std::vector<double> emitted;  // k * I^gamma per projector texel and channel
    double offset = 0.0;          // secondary-ray origin offset

    Context(const Scene &scene, const SrgbImage &input, const RenderSettings &settings);
};

struct LightLink {
    bool valid = false;
    Vec3 direction;      // toward the projector center
    double distance = 0.0;
    double falloff = 0.0;  // cos(theta_p) / d^2
    double px = 0.0, py = 0.0;
    Vec3 radiance;  // bilinear emitted radiance at (px, py)
};

struct Vertex {
    SurfaceHit hit;
    Vec3 wo;
    MaterialPoint<double> material;
    LightLink light;
    Vec3 direct_factor;  // f * cos(theta_s) * falloff
    Vec3 nee;            // direct_factor * radiance
    Vec3 beta;           // throughput arriving at this vertex
    bool bounced = false;
    Vec3 wi;
    double pdf = 0.0;
    Vec3 weight;  // f * cos / pdf (divided by the roulette survival)
    double survival = 1.0;
};

struct Sample {
    Ray primary;
    double px = 0.0, py = 0.0;
    int count = 0;
    std::array<Vertex, kMaxPathDepth> vertices;
};

MaterialPoint<double> material_at(const SceneParams &params, const Vec2 &uv);

// Traces one sample; returns the unclipped contribution. When `record`
// is given it receives every vertex.
Vec3 trace(const Context &ctx, int x, int y, int sample, Sample *record);

inline uint64_t sample_key(uint64_t seed, int width, int x, int y, int sample) {
    return hash_keys({seed, static_cast<uint64_t>(y) * static_cast<uint64_t>(width) + static_cast<uint64_t>(x),
                      static_cast<uint64_t>(sample)});
}

}  // namespace procam::path

#endif  // PROCAM_SRC_PATH_H
