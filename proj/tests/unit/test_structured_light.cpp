// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_support.h"

#include <procam/error.h>
#include <procam/geometry.h>
#include <procam/render.h>
#include <procam/structured_light.h>

#include <gtest/gtest.h>

#include <cmath>

using namespace procam;

namespace {

int bits_differing(uint32_t a, uint32_t b) { return std::popcount(a ^ b); }

// Captures of the pattern set for a fronto-parallel plane seen by an
// offset projector: spp 1 at pixel centers, direct light only.
struct PlaneCapture {
    std::unique_ptr<Scene> scene;
    GrayCodeSet set{1, 1};
    std::vector<SrgbImage> captures;
};

PlaneCapture capture_plane(int cw, int ch, int pw, int ph) {
    test::PlaneSceneOptions o;
    o.camera_width = cw;
    o.camera_height = ch;
    o.camera_f = cw * 0.9;
    o.projector_width = pw;
    o.projector_height = ph;
    o.projector_f = pw * 1.1;
    o.projector_center = {0.2, 0.0, 0.0};
    o.base_color = {0.7, 0.7, 0.7};
    o.projector_gamma = {1.0, 1.0, 1.0};
    PlaneCapture pc;
    pc.scene = test::plane_scene(o);
    pc.set = GrayCodeSet(pw, ph);
    RenderSettings rs;
    rs.spp = 1;
    rs.max_depth = 1;
    rs.jitter = false;
    for (int i = 0; i < pc.set.count(); ++i) pc.captures.push_back(render(*pc.scene, pc.set.pattern(i), rs).image);
    return pc;
}

}  // namespace

TEST(GrayCode, EncodeDecodeRoundTrip) {
    for (uint32_t v = 0; v < 4096; ++v) EXPECT_EQ(gray_decode(gray_encode(v)), v);
}

TEST(GrayCode, NeighboursDifferInOneBit) {
    for (uint32_t v = 0; v + 1 < 1024; ++v) EXPECT_EQ(bits_differing(gray_encode(v), gray_encode(v + 1)), 1);
}

TEST(GrayCode, PatternCounts) {
    EXPECT_EQ(GrayCodeSet(800, 600).count(), 42);
    EXPECT_EQ(generate_patterns(800, 600).size(), 42u);
    GrayCodeSet narrow(8, 1);
    EXPECT_EQ(narrow.bits_x(), 3);
    EXPECT_EQ(code_bits(1), 1);
    EXPECT_EQ(code_bits(9), 4);
    EXPECT_THROW(code_bits(0), std::invalid_argument);
}

TEST(GrayCode, PatternLayout) {
    GrayCodeSet set(16, 4);
    EXPECT_EQ(set.pattern(0).at(3, 2, 1), 1.0);
    EXPECT_EQ(set.pattern(1).at(3, 2, 1), 0.0);
    for (int k = 0; k < set.bits_x() + set.bits_y(); ++k) {
        SrgbImage p = set.pattern(2 + 2 * k), q = set.pattern(3 + 2 * k);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 16; ++x) EXPECT_EQ(p.at(x, y, 0) + q.at(x, y, 0), 1.0);
    }
    // First column plane is the most significant Gray bit.
    SrgbImage msb = set.pattern(2);
    for (int x = 0; x < 16; ++x) EXPECT_EQ(msb.at(x, 0, 0), ((gray_encode(x) >> 3) & 1u) ? 1.0 : 0.0);
    EXPECT_THROW(set.pattern(set.count()), std::out_of_range);
}

TEST(GrayCode, DecodesEveryColumnOfDirectPatterns) {
    GrayCodeSet set(800, 2);
    CorrespondenceMap map = decode(generate_patterns(800, 2), set);
    ASSERT_EQ(map.valid_count(), 1600u);
    for (int x = 0; x < 800; ++x) {
        EXPECT_EQ(map.projector_x[x], x + 0.5);
        EXPECT_EQ(map.projector_y[800 + x], 1.5);
    }
}

TEST(GrayCode, AllBlackCapturesAreInvalid) {
    GrayCodeSet set(16, 8);
    std::vector<SrgbImage> black(set.count(), SrgbImage(10, 10, 3, 0.0));
    EXPECT_EQ(decode(black, set).valid_count(), 0u);
}

TEST(GrayCode, CaptureCountMismatchIsRejected) {
    GrayCodeSet set(16, 8);
    std::vector<SrgbImage> caps(set.count() - 1, SrgbImage(4, 4, 3));
    EXPECT_THROW(decode(caps, set), ValidationError);
}

TEST(GrayCode, SingleFlippedBitMovesOnlyThatPixel) {
    GrayCodeSet set(32, 2);
    auto pats = generate_patterns(32, 2);
    CorrespondenceMap clean = decode(pats, set);
    // Swap the least significant column plane and its complement at x = 5.
    int lsb = 2 + 2 * (set.bits_x() - 1);
    std::swap(pats[lsb].at(5, 0, 0), pats[lsb + 1].at(5, 0, 0));
    std::swap(pats[lsb].at(5, 0, 1), pats[lsb + 1].at(5, 0, 1));
    std::swap(pats[lsb].at(5, 0, 2), pats[lsb + 1].at(5, 0, 2));
    CorrespondenceMap hit = decode(pats, set);
    for (size_t p = 0; p < clean.projector_x.size(); ++p) {
        if (p == 5) EXPECT_NE(hit.projector_x[p], clean.projector_x[p]);
        else EXPECT_EQ(hit.projector_x[p], clean.projector_x[p]);
    }
    EXPECT_EQ(std::abs(hit.projector_x[5] - clean.projector_x[5]), 1.0);  // adjacent Gray codes
}

TEST(GrayCode, SerialMatchesParallel) {
    PlaneCapture pc = capture_plane(40, 30, 64, 32);
    CorrespondenceMap a = decode(pc.captures, pc.set, {}, true), b = decode(pc.captures, pc.set, {}, false);
    EXPECT_EQ(a.projector_x, b.projector_x);
    EXPECT_EQ(a.projector_y, b.projector_y);
    EXPECT_EQ(a.valid, b.valid);
}

TEST(GrayCode, RenderedPlaneDecodesToProjectedPixel) {
    PlaneCapture pc = capture_plane(80, 60, 128, 64);
    CorrespondenceMap map = decode(pc.captures, pc.set);
    const auto &cam = pc.scene->camera;
    const auto &proj = pc.scene->projector;
    size_t valid = 0, exact = 0;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            size_t p = static_cast<size_t>(y) * map.width + x;
            if (!map.valid[p]) continue;
            ++valid;
            // Independent oracle: camera ray through the pixel center meets
            // z = 1, then the pinhole projection into the projector.
            Vec3 d = inverse(cam.intrinsics) * Vec3{x + 0.5, y + 0.5, 1.0};
            Vec3 hit = d * (1.0 / d.z);
            Vec3 q = proj.rotation * hit + proj.translation;
            Vec3 u = proj.intrinsics * q;
            double px = std::floor(u.x / u.z) + 0.5, py = std::floor(u.y / u.z) + 0.5;
            if (map.projector_x[p] == px && map.projector_y[p] == py) ++exact;
        }
    ASSERT_GT(valid, 1000u);
    EXPECT_GE(static_cast<double>(exact) / valid, 0.999);
}

TEST(Triangulation, RecoversAKnownPointExactly) {
    Mat3 kc = test::pinhole(100, 32, 24), kp = test::pinhole(150, 40, 30);
    Mat3 rp = rotation_from_axis_angle(Vec3{0.0, 0.2, 0.05});
    Vec3 tp{-0.3, 0.02, 0.1};
    CorrespondenceMap map;
    map.width = 64;
    map.height = 48;
    map.projector_x.assign(64 * 48, 0.0);
    map.projector_y.assign(64 * 48, 0.0);
    map.valid.assign(64 * 48, 0);
    int x = 20, y = 30;
    double depth = 1.7;
    Vec3 d = inverse(kc) * Vec3{x + 0.5, y + 0.5, 1.0};
    Vec3 point = d * (depth / d.z);
    Vec2 uv = project(point, kp, rp, tp);
    size_t p = static_cast<size_t>(y) * 64 + x;
    map.projector_x[p] = uv.x;
    map.projector_y[p] = uv.y;
    map.valid[p] = 1;
    DepthGrid grid = triangulate(map, kc, kp, rp, tp);
    ASSERT_EQ(grid.points.size(), 1u);
    EXPECT_NEAR(grid.depth[p], depth, 1e-6);
    EXPECT_NEAR(length(grid.points[0] - point), 0.0, 1e-6);
}

TEST(Triangulation, ZeroBaselineGivesNothing) {
    CorrespondenceMap map;
    map.width = map.height = 2;
    map.projector_x = map.projector_y = {1, 1, 1, 1};
    map.valid = {1, 1, 1, 1};
    DepthGrid grid = triangulate(map, test::pinhole(10, 1, 1), test::pinhole(10, 1, 1), Mat3::identity(), {});
    EXPECT_TRUE(grid.points.empty());
    for (auto v : grid.valid) EXPECT_EQ(v, 0);
}

TEST(Triangulation, RenderedPlaneDepthAndMesh) {
    PlaneCapture pc = capture_plane(80, 60, 256, 192);
    CorrespondenceMap map = decode(pc.captures, pc.set);
    const auto &proj = pc.scene->projector;
    DepthGrid grid = triangulate(map, pc.scene->camera.intrinsics, proj.intrinsics, proj.rotation, proj.translation);
    ASSERT_GT(grid.points.size(), 1000u);
    double se = 0.0;
    for (const Vec3 &q : grid.points) se += (q.z - 1.0) * (q.z - 1.0);
    EXPECT_LT(std::sqrt(se / grid.points.size()), 0.01);

    TriangleMesh mesh = mesh_from_depth(grid, pc.scene->camera.intrinsics);
    EXPECT_EQ(mesh.positions.size(), grid.points.size());
    EXPECT_NO_THROW(mesh.validate());
    // Quantized depths form a sawtooth, so check orientation with a
    // least-squares plane z = a x + b y + c through the points.
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sz = 0, sxz = 0, syz = 0, n = 0;
    for (const Vec3 &q : grid.points) {
        sxx += q.x * q.x, sxy += q.x * q.y, syy += q.y * q.y;
        sx += q.x, sy += q.y, sz += q.z, sxz += q.x * q.z, syz += q.y * q.z, n += 1;
    }
    Mat3 a;
    a.m = {{{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}}};
    Vec3 coef = inverse(a) * Vec3{sxz, syz, sz};
    double tilt = std::atan(std::hypot(coef.x, coef.y)) * 180.0 / kPi;
    EXPECT_LT(tilt, 0.5);

    TriangleMesh coarse = mesh_from_depth(grid, pc.scene->camera.intrinsics, 4);
    EXPECT_LT(coarse.positions.size(), mesh.positions.size() / 8);
    EXPECT_THROW(mesh_from_depth(grid, pc.scene->camera.intrinsics, 0), ValidationError);
}

TEST(Triangulation, FullValidGridMeshCounts) {
    DepthGrid grid;
    grid.width = 5;
    grid.height = 4;
    grid.depth.assign(20, 2.0);
    grid.valid.assign(20, 1);
    TriangleMesh mesh = mesh_from_depth(grid, test::pinhole(10, 2.5, 2));
    EXPECT_EQ(mesh.positions.size(), 20u);
    EXPECT_EQ(mesh.triangles.size(), 2u * 4 * 3);
    for (const Vec3 &n : mesh.normals) EXPECT_NEAR(n.z, -1.0, 1e-9);
}

TEST(Triangulation, MeshNormalsOfATiltedPlane) {
    const int W = 40, H = 30;
    Mat3 kc = test::pinhole(50, 20, 15);
    // Plane n . x = 1 with a 20 degree tilt about y, facing the camera.
    Vec3 normal = normalize(Vec3{std::sin(0.35), 0.0, -std::cos(0.35)});
    DepthGrid grid;
    grid.width = W;
    grid.height = H;
    grid.valid.assign(W * H, 1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            Vec3 d = inverse(kc) * Vec3{x + 0.5, y + 0.5, 1.0};
            grid.depth.push_back(d.z * (-1.5 / dot(normal, d)));
        }
    TriangleMesh mesh = mesh_from_depth(grid, kc);
    for (const Vec3 &n : mesh.normals)
        EXPECT_LT(std::acos(std::min(1.0, dot(n, normal))) * 180.0 / kPi, 0.5);
}
