// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

// Small hand-built scenes shared by the unit tests.

#ifndef PROCAM_TEST_SUPPORT_H
#define PROCAM_TEST_SUPPORT_H

#include <procam/mesh.h>
#include <procam/scene.h>

#include <memory>

namespace procam::test {

inline Mat3 pinhole(double f, double cx, double cy) {
    Mat3 k = Mat3::identity();
    k.m[0][0] = f;
    k.m[1][1] = f;
    k.m[0][2] = cx;
    k.m[1][2] = cy;
    return k;
}

// Axis-aligned quad at depth z spanning [x0,x1] x [y0,y1], facing -z,
// split into an nx x ny grid with uv spanning [0,1]^2.
inline TriangleMesh quad_mesh(double z, double x0, double x1, double y0, double y1, int nx = 1, int ny = 1) {
    TriangleMesh m;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            double s = double(i) / nx, t = double(j) / ny;
            m.positions.push_back({x0 + (x1 - x0) * s, y0 + (y1 - y0) * t, z});
            m.uvs.push_back({s, t});
        }
    auto id = [&](int i, int j) { return static_cast<uint32_t>(j * (nx + 1) + i); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            m.triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
            m.triangles.push_back({id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)});
        }
    m.compute_vertex_normals();
    return m;
}

struct PlaneSceneOptions {
    int camera_width = 32, camera_height = 32;
    double camera_f = 40.0;
    int projector_width = 64, projector_height = 48;
    double projector_f = 60.0;
    Vec3 projector_center{0.0, 0.0, 0.0};
    Vec3 base_color{1.0, 1.0, 1.0};
    double roughness = 1.0;
    double metallic = 0.0;
    double specular = 0.0;  // Lambertian by default
    int texture_size = 8;
    double intensity_scale = 1.0;
    Vec3 projector_gamma{2.2, 2.2, 2.2};
    Vec3 camera_gamma{1.0, 1.0, 1.0};
    Vec3 white_balance{1.0, 1.0, 1.0};
};

// Plane at z = 1 seen by the camera at the origin; the projector looks
// down +z from `projector_center` (identity rotation).
inline std::unique_ptr<Scene> plane_scene(const PlaneSceneOptions &o = {}) {
    auto s = std::make_unique<Scene>();
    s->camera.width = o.camera_width;
    s->camera.height = o.camera_height;
    s->camera.intrinsics = pinhole(o.camera_f, o.camera_width / 2.0, o.camera_height / 2.0);
    s->projector.width = o.projector_width;
    s->projector.height = o.projector_height;
    s->projector.intrinsics = pinhole(o.projector_f, o.projector_width / 2.0, o.projector_height / 2.0);
    s->projector.translation = -o.projector_center;
    s->projector.intensity_scale = o.intensity_scale;
    s->mesh = quad_mesh(1.0, -2.0, 2.0, -2.0, 2.0, 4, 4);
    s->specular = o.specular;
    s->params.set_materials(
        MaterialMaps::constant(o.texture_size, o.texture_size, o.base_color, o.roughness, o.metallic));
    s->params.set_bounds(ParamId::ProjectorGamma, 1.0, 3.0);
    s->params.set_vector(ParamId::ProjectorGamma, o.projector_gamma);
    s->params.set_vector(ParamId::CameraGamma, o.camera_gamma);
    s->params.set_vector(ParamId::WhiteBalance, o.white_balance);
    s->rebuild_acceleration();
    return s;
}

}  // namespace procam::test

#endif  // PROCAM_TEST_SUPPORT_H
