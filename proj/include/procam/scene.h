// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_SCENE_H
#define PROCAM_SCENE_H

#include <procam/geometry.h>
#include <procam/image.h>
#include <procam/math.h>
#include <procam/mesh.h>

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace procam {

// Logistic map from an unconstrained latent onto (lo, hi).
double squash_param(double latent, double lo, double hi);
// Inverse of squash_param; x is first clamped 1e-6 * (hi - lo) inside
// the interval so values on a closed bound map to a finite latent.
double unsquash_param(double x, double lo, double hi);
// d squash / d latent.
double squash_derivative(double latent, double lo, double hi);

// Pinhole projector acting as the only light source. Device coordinates
// are q = rotation * x + translation with x in the camera-centered world.
struct ProjectorModel {
    Mat3 intrinsics = Mat3::identity();
    Mat3 rotation = Mat3::identity();
    Vec3 translation;
    int width = 800;
    int height = 600;
    double gain = 1.0;
    // Linear radiance of a fully-on pixel; gain and the per-pixel solid
    // angle are folded into this constant.
    double intensity_scale = 1.0;

    Vec3 center() const { return rotation.transposed() * (-translation); }
    void validate() const;
};

// Camera at the world origin looking down +z (y down in the image).
// Pose refinement, gamma and white balance are optimizable and live in
// SceneParams.
struct CameraModel {
    Mat3 intrinsics = Mat3::identity();
    int width = 640;
    int height = 360;
    double exposure = 1.0;

    void validate() const;
};

struct MaterialMaps {
    Texture base_color;  // 3 channels in [0,1]
    Texture roughness;   // 1 channel
    Texture metallic;    // 1 channel
    Texture normal;      // 3 channels, tangent space encoded as (v + 1) / 2

    static MaterialMaps constant(int width, int height, const Vec3 &base_color, double roughness, double metallic);
};

enum class ParamId : int {
    BaseColor = 0,
    Roughness,
    Metallic,
    NormalMap,
    WhiteBalance,
    ProjectorGamma,
    CameraGamma,
    PoseRotation,     // axis-angle increment, radians
    PoseTranslation,  // scene units
};
inline constexpr int kParamCount = 9;
inline constexpr std::array<ParamId, kParamCount> kAllParams = {
    ParamId::BaseColor,   ParamId::Roughness,      ParamId::Metallic,
    ParamId::NormalMap,   ParamId::WhiteBalance,   ParamId::ProjectorGamma,
    ParamId::CameraGamma, ParamId::PoseRotation,   ParamId::PoseTranslation};

std::string_view param_name(ParamId id);
ParamId param_from_name(std::string_view name);  // throws std::invalid_argument
inline bool is_texture_param(ParamId id) { return static_cast<int>(id) <= static_cast<int>(ParamId::NormalMap); }

// One optimizable quantity: constrained values (as a texture; vectors are
// 1x1x3) plus the unconstrained latents they are squashed from.
struct ParamBlock {
    Texture value;
    std::vector<double> latent;
    double lo = 0.0;
    double hi = 1.0;
    bool open_interval = false;  // bounds exclusive (white balance)

    // value <- squash(latent)
    void update_values();
    // latent <- unsquash(value)
    void update_latents();
    size_t size() const { return value.values().size(); }
};

class SceneParams {
public:
    SceneParams();

    ParamBlock &block(ParamId id) { return blocks_[static_cast<int>(id)]; }
    const ParamBlock &block(ParamId id) const { return blocks_[static_cast<int>(id)]; }

    const Texture &base_color() const { return block(ParamId::BaseColor).value; }
    const Texture &roughness() const { return block(ParamId::Roughness).value; }
    const Texture &metallic() const { return block(ParamId::Metallic).value; }
    const Texture &normal_map() const { return block(ParamId::NormalMap).value; }
    Vec3 white_balance() const { return vector_of(ParamId::WhiteBalance); }
    Vec3 projector_gamma() const { return vector_of(ParamId::ProjectorGamma); }
    Vec3 camera_gamma() const { return vector_of(ParamId::CameraGamma); }
    Vec3 pose_rotation() const { return vector_of(ParamId::PoseRotation); }
    Vec3 pose_translation() const { return vector_of(ParamId::PoseTranslation); }

    // Setters write constrained values and refresh the latents.
    void set_vector(ParamId id, const Vec3 &v);
    void set_materials(const MaterialMaps &maps);
    MaterialMaps materials() const;
    void set_bounds(ParamId id, double lo, double hi);

    // Throws ValidationError naming the first out-of-bounds entry.
    void validate() const;

private:
    Vec3 vector_of(ParamId id) const;

    std::array<ParamBlock, kParamCount> blocks_;
};

// Everything the renderer needs. The Bvh references `mesh`, so a Scene is
// movable only through the unique_ptr returned by the factories, and
// rebuild_acceleration() must be called after editing the mesh.
struct Scene {
    ProjectorModel projector;
    CameraModel camera;
    TriangleMesh mesh;
    SceneParams params;
    double specular = 0.5;
    Bvh bvh;

    Scene() = default;
    Scene(const Scene &) = delete;
    Scene &operator=(const Scene &) = delete;

    void rebuild_acceleration() { bvh = Bvh(mesh); }
    double scene_scale() const { return mesh.scene_scale(); }
    std::unique_ptr<Scene> clone() const;
    void validate() const;
};

// Reads the JSON scene description (a directory means its scene.json);
// relative paths resolve against the file's directory. Throws ParseError (with line and field) or
// ValidationError (naming the field).
std::unique_ptr<Scene> load_scene(const std::filesystem::path &path);

// Writes <dir>/scene.json, <dir>/mesh.obj and one PFM per material map.
void save_scene(const Scene &scene, const std::filesystem::path &dir);

}  // namespace procam

#endif  // PROCAM_SCENE_H
