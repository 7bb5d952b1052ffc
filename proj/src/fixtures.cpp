// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/fixtures.h>
#include <procam/io.h>
#include <procam/render.h>
#include <procam/rng.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace procam {

std::string_view fixture_name(FixtureKind kind) {
    switch (kind) {
    case FixtureKind::FlatPlane: return "flat-plane";
    case FixtureKind::TwoPlaneCorner: return "two-plane-corner";
    case FixtureKind::TexturedRelief: return "textured-relief";
    }
    return "unknown";
}

FixtureKind fixture_from_name(std::string_view name) {
    for (auto k : {FixtureKind::FlatPlane, FixtureKind::TwoPlaneCorner, FixtureKind::TexturedRelief})
        if (fixture_name(k) == name) return k;
    throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
}

namespace {

// Grid patch origin + s*U + t*V with the face normal along `facing`.
void add_patch(TriangleMesh &mesh, const Vec3 &origin, const Vec3 &u_axis, const Vec3 &v_axis, int nu, int nv,
               const Vec2 &uv_lo, const Vec2 &uv_hi, const Vec3 &facing) {
    auto base = static_cast<uint32_t>(mesh.positions.size());
    for (int j = 0; j <= nv; ++j)
        for (int i = 0; i <= nu; ++i) {
            double s = static_cast<double>(i) / nu, t = static_cast<double>(j) / nv;
            mesh.positions.push_back(origin + u_axis * s + v_axis * t);
            mesh.uvs.push_back({uv_lo.x + (uv_hi.x - uv_lo.x) * s, uv_lo.y + (uv_hi.y - uv_lo.y) * t});
        }
    bool flip = dot(cross(u_axis, v_axis), facing) < 0.0;
    auto id = [&](int i, int j) { return base + static_cast<uint32_t>(j * (nu + 1) + i); };
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            uint32_t a = id(i, j), b = id(i + 1, j), c = id(i, j + 1), d = id(i + 1, j + 1);
            if (flip) {
                mesh.triangles.push_back({a, c, b});
                mesh.triangles.push_back({b, c, d});
            } else {
                mesh.triangles.push_back({a, b, c});
                mesh.triangles.push_back({b, d, c});
            }
        }
}

// World-to-device rotation for a device at `center` looking at `target`
// with image y pointing down (+y world).
Mat3 look_at(const Vec3 &center, const Vec3 &target) {
    Vec3 z = normalize(target - center);
    Vec3 x = normalize(cross(Vec3{0.0, 1.0, 0.0}, z));
    Vec3 y = cross(z, x);
    Mat3 r;
    for (int k = 0; k < 3; ++k) {
        r.m[0][k] = x[k];
        r.m[1][k] = y[k];
        r.m[2][k] = z[k];
    }
    return r;
}

Mat3 intrinsics(double f, double cx, double cy) {
    Mat3 k = Mat3::identity();
    k.m[0][0] = f;
    k.m[1][1] = f;
    k.m[0][2] = cx;
    k.m[1][2] = cy;
    return k;
}

void fill_rect(Texture &t, double u0, double u1, double v0, double v1, const std::vector<double> &value) {
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            double u = (x + 0.5) / t.width(), v = (y + 0.5) / t.height();
            if (u >= u0 && u < u1 && v >= v0 && v < v1)
                for (int c = 0; c < t.channels(); ++c) t.at(x, y, c) = value[c];
        }
}

}  // namespace

double calibrate_intensity_scale(const Scene &scene) {
    auto probe = scene.clone();
    probe->projector.intensity_scale = 1.0;
    RenderSettings rs;
    rs.spp = 4;
    rs.max_depth = 1;
    rs.clipping_enabled = false;
    rs.seed = 0x63616c;
    SrgbImage white(scene.projector.width, scene.projector.height, 3, 1.0);
    RenderResult r = render(*probe, white, rs);
    Vec3 wb = scene.params.white_balance();
    std::vector<double> lit;
    for (int y = 0; y < r.irradiance.height(); ++y)
        for (int x = 0; x < r.irradiance.width(); ++x) {
            Vec3 e = r.irradiance.rgb(x, y) * wb * scene.camera.exposure;
            double m = max_component(e);
            if (m > 0.0) lit.push_back(m);
        }
    if (lit.empty()) throw std::runtime_error("fixture calibration: projector lights no visible pixel");
    size_t idx = static_cast<size_t>(0.95 * static_cast<double>(lit.size() - 1));
    std::nth_element(lit.begin(), lit.begin() + static_cast<std::ptrdiff_t>(idx), lit.end());
    return 1.1 / lit[idx];
}

std::unique_ptr<Scene> make_fixture_scene(const FixtureSpec &spec) {
    auto scene = std::make_unique<Scene>();
    const double cam_scale = spec.camera_width / 640.0;
    scene->camera.width = spec.camera_width;
    scene->camera.height = spec.camera_height;
    scene->camera.intrinsics = intrinsics(560.0 * cam_scale, spec.camera_width / 2.0, spec.camera_height / 2.0);
    scene->projector.width = spec.projector_width;
    scene->projector.height = spec.projector_height;
    scene->projector.intrinsics = intrinsics(900.0 * spec.projector_width / 800.0, spec.projector_width / 2.0,
                                             spec.projector_height / 2.0);

    const int ts = spec.texture_size;
    MaterialMaps maps = MaterialMaps::constant(ts, ts, {0.6, 0.6, 0.6}, 0.5, 0.0);
    Vec3 center, target;
    TriangleMesh &mesh = scene->mesh;
    switch (spec.kind) {
    case FixtureKind::FlatPlane:
        add_patch(mesh, {-0.8, -0.5, 1.0}, {1.6, 0.0, 0.0}, {0.0, 1.0, 0.0}, 16, 10, {0.0, 0.0}, {1.0, 1.0},
                  {0.0, 0.0, -1.0});
        center = {0.35, -0.05, 0.0};
        target = {0.0, 0.0, 1.0};
        break;
    case FixtureKind::TwoPlaneCorner:
        add_patch(mesh, {-0.3, -0.6, 1.4}, {1.2, 0.0, 0.0}, {0.0, 1.2, 0.0}, 12, 12, {0.0, 0.0}, {0.7, 1.0},
                  {0.0, 0.0, -1.0});
        add_patch(mesh, {-0.3, -0.6, 0.5}, {0.0, 0.0, 0.9}, {0.0, 1.2, 0.0}, 9, 12, {0.75, 0.0}, {1.0, 1.0},
                  {1.0, 0.0, 0.0});
        fill_rect(maps.base_color, 0.0, 0.72, 0.0, 1.0, {0.7, 0.65, 0.6});
        fill_rect(maps.base_color, 0.72, 1.0, 0.0, 1.0, {0.75, 0.75, 0.75});
        // Near-specular patch on the lit wall next to the corner.
        fill_rect(maps.base_color, 0.03, 0.2, 0.33, 0.67, {0.9, 0.9, 0.9});
        fill_rect(maps.roughness, 0.03, 0.2, 0.33, 0.67, {0.1});
        fill_rect(maps.metallic, 0.03, 0.2, 0.33, 0.67, {1.0});
        center = {0.35, 0.0, 0.0};
        target = {0.35, 0.0, 1.4};
        break;
    case FixtureKind::TexturedRelief: {
        add_patch(mesh, {-0.8, -0.5, 1.0}, {1.6, 0.0, 0.0}, {0.0, 1.0, 0.0}, 64, 40, {0.0, 0.0}, {1.0, 1.0},
                  {0.0, 0.0, -1.0});
        for (size_t i = 0; i < mesh.positions.size(); ++i) {
            const Vec2 &uv = mesh.uvs[i];
            mesh.positions[i].z += 0.025 * std::sin(2.0 * kPi * 1.5 * uv.x) * std::cos(2.0 * kPi * uv.y);
        }
        for (int y = 0; y < ts; ++y)
            for (int x = 0; x < ts; ++x) {
                double u = (x + 0.5) / ts, v = (y + 0.5) / ts;
                maps.base_color.at(x, y, 0) = 0.55 + 0.3 * std::sin(2.0 * kPi * u);
                maps.base_color.at(x, y, 1) = 0.5 + 0.25 * std::cos(2.0 * kPi * v);
                maps.base_color.at(x, y, 2) = 0.45 + 0.2 * std::sin(2.0 * kPi * (u + v));
                maps.roughness.at(x, y, 0) = 0.35;
            }
        center = {0.35, -0.05, 0.0};
        target = {0.0, 0.0, 1.0};
        break;
    }
    }
    mesh.compute_vertex_normals();
    scene->projector.rotation = look_at(center, target);
    scene->projector.translation = -(scene->projector.rotation * center);

    scene->params.set_materials(maps);
    scene->params.set_vector(ParamId::ProjectorGamma, {2.3, 2.2, 2.4});
    scene->params.set_vector(ParamId::CameraGamma, {0.45, 0.5, 0.42});
    scene->params.set_vector(ParamId::WhiteBalance, {1.1, 1.0, 0.9});
    scene->rebuild_acceleration();
    scene->projector.intensity_scale = calibrate_intensity_scale(*scene);
    scene->validate();
    return scene;
}

SceneParams perturbed_params(const SceneParams &truth) {
    SceneParams p = truth;
    Vec3 gp = truth.projector_gamma(), wb = truth.white_balance();
    for (int c = 0; c < 3; ++c) {
        gp[c] = std::min(gp[c] + 0.3, 3.0);
        wb[c] = std::min(wb[c] * 1.2, 2.45);
    }
    p.set_vector(ParamId::ProjectorGamma, gp);
    p.set_vector(ParamId::WhiteBalance, wb);
    const Texture &bc = truth.base_color();
    p.set_materials(MaterialMaps::constant(bc.width(), bc.height(), {0.5, 0.5, 0.5}, 0.5, 0.0));
    p.set_vector(ParamId::PoseRotation, {});
    p.set_vector(ParamId::PoseTranslation, {});
    return p;
}

SrgbImage fixture_input(const FixtureSpec &spec, InputSet set, int index) {
    Rng rng(hash_keys({spec.seed, static_cast<uint64_t>(set), static_cast<uint64_t>(index)}));
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    Vec3 base{uni(0.15, 0.6), uni(0.15, 0.6), uni(0.15, 0.6)};
    double angle = uni(0.0, 2.0 * kPi);
    Vec3 slope{uni(-0.25, 0.25), uni(-0.25, 0.25), uni(-0.25, 0.25)};
    struct Blob {
        double u, v, inv2s2;
        Vec3 amp;
    };
    std::array<Blob, 3> blobs;
    for (auto &b : blobs) {
        b.u = uni(0.1, 0.9);
        b.v = uni(0.1, 0.9);
        double s = uni(0.08, 0.25);
        b.inv2s2 = 0.5 / (s * s);
        b.amp = {uni(-0.3, 0.5), uni(-0.3, 0.5), uni(-0.3, 0.5)};
    }
    const int W = spec.projector_width, H = spec.projector_height;
    SrgbImage img(W, H, 3);
    double ca = std::cos(angle), sa = std::sin(angle);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double u = (x + 0.5) / W, v = (y + 0.5) / H;
            double ramp = (u - 0.5) * ca + (v - 0.5) * sa;
            Vec3 c = base + slope * ramp;
            for (const auto &b : blobs) {
                double d2 = (u - b.u) * (u - b.u) + (v - b.v) * (v - b.v);
                c += b.amp * std::exp(-d2 * b.inv2s2);
            }
            for (int k = 0; k < 3; ++k) c[k] = std::clamp(c[k], 0.0, 1.0);
            img.set_rgb(x, y, c);
        }
    return img;
}

FixtureData make_fixture(const FixtureSpec &spec) {
    FixtureData data;
    data.scene = make_fixture_scene(spec);
    RenderSettings rs;
    rs.spp = spec.spp;
    rs.max_depth = spec.max_depth;
    rs.clipping_enabled = false;  // stands in for a physical capture
    auto fill = [&](InputSet set, int count, std::vector<SrgbImage> &inputs, std::vector<SrgbImage> &targets) {
        for (int i = 0; i < count; ++i) {
            inputs.push_back(fixture_input(spec, set, i));
            rs.seed = hash_keys({spec.seed, static_cast<uint64_t>(set), static_cast<uint64_t>(i), 0x746172ULL});
            targets.push_back(render(*data.scene, inputs.back(), rs).image);
        }
    };
    fill(InputSet::Train, spec.train_count, data.train_inputs, data.train_targets);
    fill(InputSet::Test, spec.test_count, data.test_inputs, data.test_targets);
    return data;
}

void write_fixture(const FixtureData &data, const std::filesystem::path &dir) {
    save_scene(*data.scene, dir / "truth");
    auto init = data.scene->clone();
    init->params = perturbed_params(data.scene->params);
    save_scene(*init, dir / "init");
    auto write_set = [&](const std::string &name, const std::vector<SrgbImage> &inputs,
                         const std::vector<SrgbImage> &targets) {
        std::filesystem::create_directories(dir / name);
        char buf[32];
        for (size_t i = 0; i < inputs.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%03zu.png", i);
            write_png(dir / name / ("input_" + std::string(buf)), inputs[i]);
            write_png(dir / name / ("target_" + std::string(buf)), targets[i]);
        }
    };
    write_set("train", data.train_inputs, data.train_targets);
    write_set("test", data.test_inputs, data.test_targets);
}

}  // namespace procam
