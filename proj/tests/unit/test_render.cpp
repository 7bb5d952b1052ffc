// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_support.h"

#include <procam/error.h>
#include <procam/fixtures.h>
#include <procam/parallel.h>
#include <procam/render.h>

#include <gtest/gtest.h>

#include <cmath>

using namespace procam;

namespace {

double mean_of(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Direct irradiance of the Lambertian plane z = 1 under a constant input,
// averaged over the pixel footprint with a 16x16 midpoint rule. The
// projector sits at `c` (z = 0) looking down +z, so both cosines are 1/d.
double plane_oracle(const Scene &scene, int px, int py, double input, double gamma, double albedo, const Vec3 &c) {
    const Mat3 kinv = inverse(scene.camera.intrinsics);
    const double le = scene.projector.intensity_scale * std::pow(input, gamma);
    const int n = 16;
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec3 d = kinv * Vec3{px + (i + 0.5) / n, py + (j + 0.5) / n, 1.0};
            Vec3 x = d * (1.0 / d.z);
            double dist = length(x - c);
            sum += le * albedo / kPi / std::pow(dist, 4);
        }
    return sum / (n * n);
}

void append(TriangleMesh &mesh, const TriangleMesh &part) {
    auto offset = static_cast<uint32_t>(mesh.positions.size());
    mesh.positions.insert(mesh.positions.end(), part.positions.begin(), part.positions.end());
    mesh.normals.insert(mesh.normals.end(), part.normals.begin(), part.normals.end());
    mesh.uvs.insert(mesh.uvs.end(), part.uvs.begin(), part.uvs.end());
    for (auto t : part.triangles) {
        for (auto &v : t) v += offset;
        mesh.triangles.push_back(t);
    }
}

}  // namespace

TEST(Render, BlackInputRendersBlack) {
    auto scene = test::plane_scene();
    SrgbImage black(64, 48, 3, 0.0);
    RenderSettings rs;
    rs.spp = 8;
    RenderResult r = render(*scene, black, rs);
    for (double v : r.image.storage()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.dropped_samples, 0u);
}

TEST(Render, DirectLightingMatchesQuadrature) {
    test::PlaneSceneOptions o;
    o.camera_width = o.camera_height = 12;
    o.camera_f = 24;
    o.projector_center = {0.1, 0.0, 0.0};
    o.base_color = {0.6, 0.6, 0.6};
    o.projector_gamma = {2.0, 2.0, 2.0};
    auto scene = test::plane_scene(o);
    RenderSettings rs;
    rs.spp = 256;
    rs.max_depth = 1;
    rs.clipping_enabled = false;
    RenderResult r = render(*scene, SrgbImage(64, 48, 3, 0.7), rs);
    int within = 0, total = 0;
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) {
            double oracle = plane_oracle(*scene, x, y, 0.7, 2.0, 0.6, o.projector_center);
            for (int c = 0; c < 3; ++c) {
                double sigma = std::sqrt(r.variance_of_mean.at(x, y, c));
                ++total;
                if (std::abs(r.irradiance.at(x, y, c) - oracle) <= 3.0 * sigma + 1e-12) ++within;
                EXPECT_NEAR(r.irradiance.at(x, y, c), oracle, 5.0 * sigma + 1e-9);
            }
        }
    EXPECT_GE(within, static_cast<int>(0.95 * total));
}

TEST(Render, MoreSamplesAgreeInTheMean) {
    test::PlaneSceneOptions o;
    o.roughness = 0.4;
    o.specular = 0.5;
    o.projector_center = {0.2, 0.1, 0.0};
    auto scene = test::plane_scene(o);
    SrgbImage input(64, 48, 3, 0.6);
    RenderSettings lo, hi;
    lo.spp = 16;
    hi.spp = 1024;
    double a = mean_of(render(*scene, input, lo).irradiance.storage());
    double b = mean_of(render(*scene, input, hi).irradiance.storage());
    EXPECT_NEAR(a, b, 0.02 * b);
}

TEST(Render, AuxBuffersDescribeThePrimaryHit) {
    test::PlaneSceneOptions o;
    o.base_color = {0.3, 0.5, 0.7};
    auto scene = test::plane_scene(o);
    AuxBuffers aux = render_aux(*scene);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            EXPECT_EQ(aux.mask.at(x, y), 1.0);
            EXPECT_NEAR(aux.albedo.at(x, y, 2), 0.7, 1e-12);
            EXPECT_NEAR(aux.normal.at(x, y, 2), -1.0, 1e-12);
            Vec3 d = camera_ray(*scene, x + 0.5, y + 0.5).direction;
            EXPECT_NEAR(aux.depth.at(x, y), 1.0 / d.z, 1e-9);
        }
    AuxBuffers again = render_aux(*scene, true);
    EXPECT_EQ(aux.depth.storage(), again.depth.storage());
    EXPECT_EQ(aux.albedo.storage(), again.albedo.storage());
}

TEST(Render, MissesHaveEmptyMask) {
    auto scene = test::plane_scene();
    scene->mesh = test::quad_mesh(1.0, -0.1, 0.1, -0.1, 0.1);
    scene->rebuild_acceleration();
    AuxBuffers aux = render_aux(*scene);
    EXPECT_EQ(aux.mask.at(0, 0), 0.0);
    EXPECT_EQ(aux.mask.at(16, 16), 1.0);
    RenderSettings rs;
    rs.spp = 4;
    EXPECT_EQ(render(*scene, SrgbImage(64, 48, 3, 1.0), rs).image.at(0, 0, 0), 0.0);
}

TEST(Render, LinearInTheInputWithUnitGammas) {
    test::PlaneSceneOptions o;
    o.projector_gamma = {1.0, 1.0, 1.0};
    o.roughness = 0.5;
    o.specular = 0.5;
    o.projector_center = {0.2, 0.0, 0.0};
    auto scene = test::plane_scene(o);
    RenderSettings rs;
    rs.spp = 8;
    rs.clipping_enabled = false;
    RenderResult a = render(*scene, SrgbImage(64, 48, 3, 0.25), rs);
    RenderResult b = render(*scene, SrgbImage(64, 48, 3, 0.5), rs);
    for (size_t i = 0; i < a.irradiance.storage().size(); ++i)
        EXPECT_NEAR(2.0 * a.irradiance.storage()[i], b.irradiance.storage()[i], 1e-12);
}

TEST(Render, OccluderCastsAShadow) {
    test::PlaneSceneOptions o;
    o.projector_center = {0.3, 0.0, 0.0};
    auto lit = test::plane_scene(o);
    auto shadowed = test::plane_scene(o);
    append(shadowed->mesh, test::quad_mesh(0.5, 0.12, 0.18, -0.03, 0.03));
    shadowed->rebuild_acceleration();
    RenderSettings rs;
    rs.spp = 16;
    rs.max_depth = 1;
    SrgbImage white(64, 48, 3, 1.0);
    RenderResult a = render(*lit, white, rs), b = render(*shadowed, white, rs);
    EXPECT_GT(a.irradiance.at(16, 16, 0), 0.1);
    EXPECT_EQ(b.irradiance.at(16, 16, 0), 0.0);
    EXPECT_GT(a.irradiance.at(10, 10, 0), 0.1);
    EXPECT_EQ(b.irradiance.at(10, 10, 0), a.irradiance.at(10, 10, 0));
}

TEST(Render, ClippingBoundsEverySample) {
    test::PlaneSceneOptions o;
    o.roughness = 0.05;
    o.specular = 1.0;
    o.metallic = 1.0;
    o.white_balance = {1.0, 0.8, 1.25};
    o.projector_center = {0.05, 0.0, 0.0};
    auto scene = test::plane_scene(o);
    RenderSettings rs;
    rs.spp = 64;
    RenderResult r = render(*scene, SrgbImage(64, 48, 3, 1.0), rs);
    const double bound = scene->projector.intensity_scale / 0.8;
    for (double v : r.irradiance.storage()) EXPECT_LE(v, bound + 1e-12);
    EXPECT_GT(r.clipped_samples, 0u);

    rs.clipping_enabled = false;
    RenderResult raw = render(*scene, SrgbImage(64, 48, 3, 1.0), rs);
    EXPECT_EQ(raw.clipped_samples, 0u);
    double peak = 0.0;
    for (double v : raw.irradiance.storage()) peak = std::max(peak, v);
    EXPECT_GT(peak, bound);
}

TEST(Render, InterreflectionsBrightenTheCorner) {
    FixtureSpec spec;
    spec.kind = FixtureKind::TwoPlaneCorner;
    spec.camera_width = 64;
    spec.camera_height = 36;
    spec.projector_width = 80;
    spec.projector_height = 60;
    auto scene = make_fixture_scene(spec);
    SrgbImage input(80, 60, 3, 0.8);
    RenderSettings one, four;
    one.spp = four.spp = 64;
    one.max_depth = 1;
    four.max_depth = 4;
    double a = mean_of(render(*scene, input, one).irradiance.storage());
    double b = mean_of(render(*scene, input, four).irradiance.storage());
    EXPECT_GT(b, a * 1.01);
}

TEST(Render, IdenticalAcrossThreadCountsAndSerial) {
    test::PlaneSceneOptions o;
    o.roughness = 0.3;
    o.specular = 0.5;
    o.projector_center = {0.2, 0.0, 0.0};
    auto scene = test::plane_scene(o);
    SrgbImage input(64, 48, 3, 0.5);
    RenderSettings rs;
    rs.spp = 8;
    rs.seed = 42;
    const int saved = thread_count();
    set_thread_count(1);
    RenderResult a = render(*scene, input, rs);
    set_thread_count(4);
    RenderResult b = render(*scene, input, rs);
    set_thread_count(saved);
    rs.serial = true;
    RenderResult c = render(*scene, input, rs);
    EXPECT_EQ(a.image.storage(), b.image.storage());
    EXPECT_EQ(a.image.storage(), c.image.storage());
    EXPECT_EQ(a.variance_of_mean.storage(), c.variance_of_mean.storage());
}

TEST(Render, SeedChangesTheNoise) {
    auto scene = test::plane_scene();
    RenderSettings rs;
    rs.spp = 2;
    RenderResult a = render(*scene, SrgbImage(64, 48, 3, 0.5), rs);
    rs.seed = 1;
    RenderResult b = render(*scene, SrgbImage(64, 48, 3, 0.5), rs);
    EXPECT_NE(a.irradiance.storage(), b.irradiance.storage());
}

TEST(Render, RejectsBadInputs) {
    auto scene = test::plane_scene();
    EXPECT_THROW(render(*scene, SrgbImage(63, 48, 3), {}), ValidationError);
    RenderSettings rs;
    rs.spp = 0;
    EXPECT_THROW(render(*scene, SrgbImage(64, 48, 3), rs), ValidationError);
}

TEST(Render, ScaledCameraHalvesIntrinsics) {
    auto scene = test::plane_scene();
    CameraModel half = scaled_camera(scene->camera, 0.5);
    EXPECT_EQ(half.width, 16);
    EXPECT_EQ(half.height, 16);
    EXPECT_NEAR(half.intrinsics.m[0][0], 20.0, 1e-12);
    EXPECT_NEAR(half.intrinsics.m[0][2], 8.0, 1e-12);
}
