// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/error.h>
#include <procam/io.h>
#include <procam/scene.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace procam {

using json = nlohmann::json;

double squash_param(double latent, double lo, double hi) {
    double s = latent >= 0.0 ? 1.0 / (1.0 + std::exp(-latent)) : std::exp(latent) / (1.0 + std::exp(latent));
    return lo + (hi - lo) * s;
}

double unsquash_param(double x, double lo, double hi) {
    double eps = 1e-6 * (hi - lo);
    x = std::clamp(x, lo + eps, hi - eps);
    double s = (x - lo) / (hi - lo);
    return std::log(s / (1.0 - s));
}

double squash_derivative(double latent, double lo, double hi) {
    double s = squash_param(latent, 0.0, 1.0);
    return (hi - lo) * s * (1.0 - s);
}

void ParamBlock::update_values() {
    auto &v = value.values();
    for (size_t i = 0; i < v.size(); ++i) v[i] = squash_param(latent[i], lo, hi);
}

void ParamBlock::update_latents() {
    const auto &v = value.values();
    latent.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i) latent[i] = unsquash_param(v[i], lo, hi);
}

namespace {

constexpr std::array<std::string_view, kParamCount> kParamNames = {
    "base_color",   "roughness",       "metallic",     "normal",          "white_balance",
    "projector_gamma", "camera_gamma", "pose_rotation", "pose_translation"};

ParamBlock make_block(int w, int h, int c, double fill, double lo, double hi, bool open = false) {
    ParamBlock b;
    b.value = Texture(w, h, c, fill);
    b.lo = lo;
    b.hi = hi;
    b.open_interval = open;
    b.update_latents();
    return b;
}

void check_channels(const Texture &t, int channels, const char *field) {
    if (t.channels() != channels || t.width() <= 0 || t.height() <= 0)
        throw ValidationError(field, "expected a non-empty " + std::to_string(channels) + "-channel texture");
}

}  // namespace

std::string_view param_name(ParamId id) { return kParamNames[static_cast<int>(id)]; }

ParamId param_from_name(std::string_view name) {
    for (int i = 0; i < kParamCount; ++i)
        if (kParamNames[i] == name) return static_cast<ParamId>(i);
    throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

void ProjectorModel::validate() const {
    Mat3 rrt = rotation * rotation.transposed();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(rrt.m[i][j] - (i == j ? 1.0 : 0.0)) >= 1e-6)
                throw ValidationError("projector.rotation", "not orthonormal");
    if (determinant(rotation) <= 0.0) throw ValidationError("projector.rotation", "determinant must be +1");
    if (!(gain > 0.0)) throw ValidationError("projector.gain", "must be positive");
    if (!(intensity_scale > 0.0)) throw ValidationError("projector.intensity_scale", "must be positive");
    if (width <= 0 || height <= 0) throw ValidationError("projector.resolution", "must be positive");
    if (!(std::abs(determinant(intrinsics)) > 1e-12)) throw ValidationError("projector.intrinsics", "singular");
}

void CameraModel::validate() const {
    if (width <= 0 || height <= 0) throw ValidationError("camera.resolution", "must be positive");
    if (!(exposure > 0.0)) throw ValidationError("camera.exposure", "must be positive");
    if (!(std::abs(determinant(intrinsics)) > 1e-12)) throw ValidationError("camera.intrinsics", "singular");
}

MaterialMaps MaterialMaps::constant(int width, int height, const Vec3 &base_color, double roughness,
                                    double metallic) {
    MaterialMaps m;
    m.base_color = Texture(width, height, 3);
    for (size_t i = 0; i < m.base_color.texel_count(); ++i)
        for (int c = 0; c < 3; ++c) m.base_color.values()[i * 3 + c] = base_color[c];
    m.roughness = Texture(width, height, 1, roughness);
    m.metallic = Texture(width, height, 1, metallic);
    m.normal = Texture(width, height, 3);
    for (size_t i = 0; i < m.normal.texel_count(); ++i) {
        m.normal.values()[i * 3 + 0] = 0.5;
        m.normal.values()[i * 3 + 1] = 0.5;
        m.normal.values()[i * 3 + 2] = 1.0;
    }
    return m;
}

SceneParams::SceneParams() {
    block(ParamId::BaseColor) = make_block(1, 1, 3, 0.5, 0.0, 1.0);
    block(ParamId::Roughness) = make_block(1, 1, 1, 0.5, 0.03, 1.0);
    block(ParamId::Metallic) = make_block(1, 1, 1, 0.0, 0.0, 1.0);
    block(ParamId::NormalMap) = make_block(1, 1, 3, 0.5, 0.0, 1.0);
    block(ParamId::NormalMap).value.values()[2] = 1.0;
    block(ParamId::NormalMap).update_latents();
    block(ParamId::WhiteBalance) = make_block(1, 1, 3, 1.0, 0.2, 2.5, true);
    block(ParamId::ProjectorGamma) = make_block(1, 1, 3, 2.2, 2.0, 3.0);
    block(ParamId::CameraGamma) = make_block(1, 1, 3, 1.0 / 2.2, 1.0 / 3.0, 1.0);
    block(ParamId::PoseRotation) = make_block(1, 1, 3, 0.0, -0.1, 0.1);
    block(ParamId::PoseTranslation) = make_block(1, 1, 3, 0.0, -0.1, 0.1);
}

Vec3 SceneParams::vector_of(ParamId id) const {
    const auto &v = block(id).value.values();
    return {v[0], v[1], v[2]};
}

void SceneParams::set_vector(ParamId id, const Vec3 &v) {
    auto &b = block(id);
    b.value = Texture(1, 1, 3);
    for (int c = 0; c < 3; ++c) b.value.values()[c] = v[c];
    b.update_latents();
}

void SceneParams::set_bounds(ParamId id, double lo, double hi) {
    auto &b = block(id);
    b.lo = lo;
    b.hi = hi;
    b.update_latents();
}

void SceneParams::set_materials(const MaterialMaps &maps) {
    check_channels(maps.base_color, 3, "materials.base_color");
    check_channels(maps.roughness, 1, "materials.roughness");
    check_channels(maps.metallic, 1, "materials.metallic");
    check_channels(maps.normal, 3, "materials.normal");
    block(ParamId::BaseColor).value = maps.base_color;
    block(ParamId::Roughness).value = maps.roughness;
    // Roughness floor.
    for (double &r : block(ParamId::Roughness).value.values()) r = std::max(r, block(ParamId::Roughness).lo);
    block(ParamId::Metallic).value = maps.metallic;
    block(ParamId::NormalMap).value = maps.normal;
    for (ParamId id : {ParamId::BaseColor, ParamId::Roughness, ParamId::Metallic, ParamId::NormalMap})
        block(id).update_latents();
}

MaterialMaps SceneParams::materials() const {
    return {base_color(), roughness(), metallic(), normal_map()};
}

void SceneParams::validate() const {
    for (ParamId id : kAllParams) {
        const auto &b = block(id);
        const auto &v = b.value.values();
        for (size_t i = 0; i < v.size(); ++i) {
            bool ok = b.open_interval ? (v[i] > b.lo && v[i] < b.hi) : (v[i] >= b.lo && v[i] <= b.hi);
            if (!ok || !std::isfinite(v[i])) {
                std::ostringstream msg;
                msg << "value " << v[i] << " outside " << (b.open_interval ? "(" : "[") << b.lo << ", " << b.hi
                    << (b.open_interval ? ")" : "]");
                throw ValidationError("params." + std::string(param_name(id)) + "[" + std::to_string(i) + "]",
                                      msg.str());
            }
        }
    }
}

std::unique_ptr<Scene> Scene::clone() const {
    auto s = std::make_unique<Scene>();
    s->projector = projector;
    s->camera = camera;
    s->mesh = mesh;
    s->params = params;
    s->specular = specular;
    s->rebuild_acceleration();
    return s;
}

void Scene::validate() const {
    projector.validate();
    camera.validate();
    mesh.validate();
    params.validate();
    if (!(specular >= 0.0 && specular <= 1.0)) throw ValidationError("materials.specular", "must lie in [0,1]");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const json &require(const json &j, const std::string &key, const std::string &path) {
    if (!j.is_object() || !j.contains(key)) throw ParseError("field '" + path + key + "': missing");
    return j.at(key);
}

double as_number(const json &j, const std::string &field) {
    if (!j.is_number()) throw ParseError("field '" + field + "': expected a number");
    return j.get<double>();
}

Vec3 as_vec3(const json &j, const std::string &field) {
    if (j.is_number()) {
        double v = j.get<double>();
        return {v, v, v};
    }
    if (!j.is_array() || j.size() != 3) throw ParseError("field '" + field + "': expected 3 numbers");
    return {as_number(j[0], field + "[0]"), as_number(j[1], field + "[1]"), as_number(j[2], field + "[2]")};
}

Mat3 as_mat3(const json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 3) throw ParseError("field '" + field + "': expected a 3x3 array");
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        Vec3 row = as_vec3(j[r], field + "[" + std::to_string(r) + "]");
        for (int c = 0; c < 3; ++c) m.m[r][c] = row[c];
    }
    return m;
}

std::pair<int, int> as_resolution(const json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ParseError("field '" + field + "': expected [width, height]");
    return {j[0].get<int>(), j[1].get<int>()};
}

json mat3_json(const Mat3 &m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r) a.push_back({m.m[r][0], m.m[r][1], m.m[r][2]});
    return a;
}

Texture load_material(const json &j, int channels, const std::filesystem::path &base, const std::string &field) {
    if (j.is_string()) {
        Texture t = read_texture_pfm(base / j.get<std::string>());
        if (t.channels() != channels)
            throw ValidationError(field, "texture has " + std::to_string(t.channels()) + " channels, expected " +
                                             std::to_string(channels));
        return t;
    }
    if (j.is_object() && j.contains("constant")) {
        auto [w, h] = j.contains("resolution") ? as_resolution(j["resolution"], field + ".resolution")
                                               : std::pair<int, int>{1, 1};
        if (w <= 0 || h <= 0) throw ValidationError(field + ".resolution", "must be positive");
        Texture t(w, h, channels);
        if (channels == 1) {
            double v = as_number(j["constant"], field + ".constant");
            std::fill(t.values().begin(), t.values().end(), v);
        } else {
            Vec3 v = as_vec3(j["constant"], field + ".constant");
            for (size_t i = 0; i < t.texel_count(); ++i)
                for (int c = 0; c < 3; ++c) t.values()[i * 3 + c] = v[c];
        }
        return t;
    }
    throw ParseError("field '" + field + "': expected a PFM path or {\"constant\": ...}");
}

void check_texture_range(const Texture &t, double lo, double hi, const std::string &field) {
    const auto &v = t.values();
    for (size_t i = 0; i < v.size(); ++i)
        if (!(v[i] >= lo && v[i] <= hi))
            throw ValidationError(field + "[" + std::to_string(i) + "]",
                                  "texel " + std::to_string(v[i]) + " outside [" + std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
}

int line_of_byte(const std::string &text, size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::unique_ptr<Scene> load_scene(const std::filesystem::path &where) {
    const std::filesystem::path path = std::filesystem::is_directory(where) ? where / "scene.json" : where;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(path.string() + ":" + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
    std::filesystem::path base = path.parent_path();
    auto scene = std::make_unique<Scene>();

    const json &pj = require(doc, "projector", "");
    scene->projector.intrinsics = as_mat3(require(pj, "intrinsics", "projector."), "projector.intrinsics");
    scene->projector.rotation =
        pj.contains("rotation") ? as_mat3(pj["rotation"], "projector.rotation") : Mat3::identity();
    scene->projector.translation = as_vec3(require(pj, "translation", "projector."), "projector.translation");
    std::tie(scene->projector.width, scene->projector.height) =
        as_resolution(require(pj, "resolution", "projector."), "projector.resolution");
    if (pj.contains("gain")) scene->projector.gain = as_number(pj["gain"], "projector.gain");
    scene->projector.intensity_scale =
        as_number(require(pj, "intensity_scale", "projector."), "projector.intensity_scale");

    const json &cj = require(doc, "camera", "");
    scene->camera.intrinsics = as_mat3(require(cj, "intrinsics", "camera."), "camera.intrinsics");
    std::tie(scene->camera.width, scene->camera.height) =
        as_resolution(require(cj, "resolution", "camera."), "camera.resolution");
    if (cj.contains("exposure")) scene->camera.exposure = as_number(cj["exposure"], "camera.exposure");

    const json &mj = require(doc, "mesh", "");
    if (!mj.is_string()) throw ParseError("field 'mesh': expected a path to an OBJ file");
    scene->mesh = read_obj(base / mj.get<std::string>());

    const json &matj = require(doc, "materials", "");
    MaterialMaps maps;
    maps.base_color = load_material(require(matj, "base_color", "materials."), 3, base, "materials.base_color");
    maps.roughness = load_material(require(matj, "roughness", "materials."), 1, base, "materials.roughness");
    maps.metallic = load_material(require(matj, "metallic", "materials."), 1, base, "materials.metallic");
    if (matj.contains("normal")) {
        maps.normal = load_material(matj["normal"], 3, base, "materials.normal");
    } else {
        maps.normal = MaterialMaps::constant(1, 1, Vec3{}, 0.5, 0.0).normal;
    }
    check_texture_range(maps.base_color, 0.0, 1.0, "materials.base_color");
    check_texture_range(maps.roughness, 0.0, 1.0, "materials.roughness");
    check_texture_range(maps.metallic, 0.0, 1.0, "materials.metallic");
    check_texture_range(maps.normal, 0.0, 1.0, "materials.normal");
    if (matj.contains("specular")) scene->specular = as_number(matj["specular"], "materials.specular");
    scene->params.set_materials(maps);

    if (doc.contains("params")) {
        const json &params = doc["params"];
        if (!params.is_object()) throw ParseError("field 'params': expected an object");
        for (ParamId id : {ParamId::WhiteBalance, ParamId::ProjectorGamma, ParamId::CameraGamma,
                           ParamId::PoseRotation, ParamId::PoseTranslation}) {
            std::string key(param_name(id));
            if (!params.contains(key)) continue;
            const json &e = params[key];
            std::string field = "params." + key;
            if (e.is_object()) {
                if (e.contains("bounds")) {
                    const json &b = e["bounds"];
                    if (!b.is_array() || b.size() != 2) throw ParseError("field '" + field + ".bounds': expected [lo, hi]");
                    double lo = as_number(b[0], field + ".bounds[0]"), hi = as_number(b[1], field + ".bounds[1]");
                    if (!(lo < hi)) throw ValidationError(field + ".bounds", "lo must be below hi");
                    scene->params.block(id).lo = lo;
                    scene->params.block(id).hi = hi;
                }
                scene->params.set_vector(id, as_vec3(require(e, "value", field + "."), field + ".value"));
            } else {
                scene->params.set_vector(id, as_vec3(e, field));
            }
        }
    }
    scene->validate();
    scene->rebuild_acceleration();
    return scene;
}

void save_scene(const Scene &scene, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    json doc;
    const auto &p = scene.projector;
    doc["projector"] = {{"intrinsics", mat3_json(p.intrinsics)},
                        {"rotation", mat3_json(p.rotation)},
                        {"translation", {p.translation.x, p.translation.y, p.translation.z}},
                        {"resolution", {p.width, p.height}},
                        {"gain", p.gain},
                        {"intensity_scale", p.intensity_scale}};
    const auto &c = scene.camera;
    doc["camera"] = {{"intrinsics", mat3_json(c.intrinsics)},
                     {"resolution", {c.width, c.height}},
                     {"exposure", c.exposure}};
    doc["mesh"] = "mesh.obj";
    write_obj(dir / "mesh.obj", scene.mesh);
    json mats;
    for (ParamId id : {ParamId::BaseColor, ParamId::Roughness, ParamId::Metallic, ParamId::NormalMap}) {
        std::string name(param_name(id));
        write_texture_pfm(dir / (name + ".pfm"), scene.params.block(id).value);
        mats[name] = name + ".pfm";
    }
    mats["specular"] = scene.specular;
    doc["materials"] = mats;
    json params;
    for (ParamId id : {ParamId::WhiteBalance, ParamId::ProjectorGamma, ParamId::CameraGamma, ParamId::PoseRotation,
                       ParamId::PoseTranslation}) {
        const auto &b = scene.params.block(id);
        const auto &v = b.value.values();
        params[std::string(param_name(id))] = {{"value", {v[0], v[1], v[2]}}, {"bounds", {b.lo, b.hi}}};
    }
    doc["params"] = params;
    std::ofstream out(dir / "scene.json");
    if (!out) throw IoError("cannot write " + (dir / "scene.json").string());
    out << doc.dump(2) << "\n";
}

}  // namespace procam
