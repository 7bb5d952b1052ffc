// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/error.h>
#include <procam/geometry.h>
#include <procam/parallel.h>
#include <procam/structured_light.h>

#include <cmath>

namespace procam {

int code_bits(int n) {
    if (n < 1) throw std::invalid_argument("code_bits: n must be positive");
    int bits = 1;
    while ((1 << bits) < n) ++bits;
    return bits;
}

GrayCodeSet::GrayCodeSet(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw ValidationError("patterns", "dimensions must be positive");
    bits_x_ = code_bits(width);
    bits_y_ = code_bits(height);
}

SrgbImage GrayCodeSet::pattern(int index) const {
    if (index < 0 || index >= count()) throw std::out_of_range("pattern index");
    if (index == 0) return SrgbImage(width_, height_, 3, 1.0);
    if (index == 1) return SrgbImage(width_, height_, 3, 0.0);
    int k = index - 2;
    bool complement = (k % 2) == 1;
    int plane = k / 2;
    bool columns = plane < bits_x_;
    int bits = columns ? bits_x_ : bits_y_;
    int bit = bits - 1 - (columns ? plane : plane - bits_x_);
    SrgbImage img(width_, height_, 3);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) {
            uint32_t code = gray_encode(static_cast<uint32_t>(columns ? x : y));
            bool on = ((code >> bit) & 1u) != 0;
            if (complement) on = !on;
            double v = on ? 1.0 : 0.0;
            img.set_rgb(x, y, {v, v, v});
        }
    return img;
}

std::vector<SrgbImage> generate_patterns(int width, int height) {
    GrayCodeSet set(width, height);
    std::vector<SrgbImage> out;
    out.reserve(set.count());
    for (int i = 0; i < set.count(); ++i) out.push_back(set.pattern(i));
    return out;
}

size_t CorrespondenceMap::valid_count() const {
    size_t n = 0;
    for (uint8_t v : valid) n += v;
    return n;
}

namespace {

double intensity(const SrgbImage &img, size_t pixel) {
    int c = img.channels();
    double s = 0.0;
    for (int k = 0; k < c; ++k) s += img.storage()[pixel * c + k];
    return s / c;
}

}  // namespace

CorrespondenceMap decode(const std::vector<SrgbImage> &captures, const GrayCodeSet &set,
                         const DecodeThresholds &thresholds, bool serial) {
    if (static_cast<int>(captures.size()) != set.count())
        throw ValidationError("captures", "expected " + std::to_string(set.count()) + " images, got " +
                                              std::to_string(captures.size()));
    const int W = captures[0].width(), H = captures[0].height();
    for (const auto &c : captures)
        if (!c.same_shape(W, H)) throw ValidationError("captures", "images differ in resolution");
    CorrespondenceMap map;
    map.width = W;
    map.height = H;
    map.projector_x.assign(static_cast<size_t>(W) * H, 0.0);
    map.projector_y.assign(map.projector_x.size(), 0.0);
    map.valid.assign(map.projector_x.size(), 0);
    parallel_for(
        H,
        [&](int64_t y) {
            for (int x = 0; x < W; ++x) {
                size_t p = static_cast<size_t>(y) * W + x;
                if (intensity(captures[0], p) - intensity(captures[1], p) <= thresholds.white_black) continue;
                auto read_axis = [&](int first_plane, int bits, uint32_t &value) {
                    uint32_t code = 0;
                    for (int b = 0; b < bits; ++b) {
                        int idx = 2 + 2 * (first_plane + b);
                        double d = intensity(captures[idx], p) - intensity(captures[idx + 1], p);
                        if (std::abs(d) <= thresholds.bit_contrast) return false;
                        code = (code << 1) | (d > 0.0 ? 1u : 0u);
                    }
                    value = gray_decode(code);
                    return true;
                };
                uint32_t cx = 0, cy = 0;
                if (!read_axis(0, set.bits_x(), cx) || !read_axis(set.bits_x(), set.bits_y(), cy)) continue;
                if (cx >= static_cast<uint32_t>(set.width()) || cy >= static_cast<uint32_t>(set.height())) continue;
                map.projector_x[p] = cx + 0.5;
                map.projector_y[p] = cy + 0.5;
                map.valid[p] = 1;
            }
        },
        serial);
    return map;
}

DepthGrid triangulate(const CorrespondenceMap &map, const Mat3 &camera_k, const Mat3 &projector_k,
                      const Mat3 &projector_r, const Vec3 &projector_t) {
    DepthGrid grid;
    grid.width = map.width;
    grid.height = map.height;
    grid.depth.assign(static_cast<size_t>(map.width) * map.height, 0.0);
    grid.valid.assign(grid.depth.size(), 0);
    const Mat3 kc_inv = inverse(camera_k), kp_inv = inverse(projector_k);
    const Mat3 rt = projector_r.transposed();
    const Vec3 center = rt * (-projector_t);
    const double baseline = length(center);
    if (!(baseline > 1e-12)) return grid;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            size_t p = static_cast<size_t>(y) * map.width + x;
            if (!map.valid[p]) continue;
            Vec3 dc = normalize(kc_inv * Vec3{x + 0.5, y + 0.5, 1.0});
            Vec3 dp = normalize(rt * (kp_inv * Vec3{map.projector_x[p], map.projector_y[p], 1.0}));
            // Closest points o_c + s dc and c + t dp.
            Vec3 w0 = -center;
            double b = dot(dc, dp), d = dot(dc, w0), e = dot(dp, w0);
            double denom = 1.0 - b * b;
            if (denom < 1e-12) continue;
            double s = (b * e - d) / denom;
            double t = (e - b * d) / denom;
            Vec3 mid = (dc * s + (center + dp * t)) * 0.5;
            if (!(mid.z > 0.0) || s <= 0.0 || t <= 0.0) continue;
            grid.depth[p] = mid.z;
            grid.valid[p] = 1;
            grid.points.push_back(mid);
        }
    return grid;
}

TriangleMesh mesh_from_depth(const DepthGrid &grid, const Mat3 &camera_k, int stride) {
    if (stride < 1) throw ValidationError("stride", "must be positive");
    const Mat3 kc_inv = inverse(camera_k);
    const int gw = (grid.width + stride - 1) / stride, gh = (grid.height + stride - 1) / stride;
    std::vector<int64_t> vertex(static_cast<size_t>(gw) * gh, -1);
    TriangleMesh mesh;
    for (int j = 0; j < gh; ++j)
        for (int i = 0; i < gw; ++i) {
            int x = i * stride, y = j * stride;
            size_t p = static_cast<size_t>(y) * grid.width + x;
            if (!grid.valid[p]) continue;
            Vec3 ray = kc_inv * Vec3{x + 0.5, y + 0.5, 1.0};
            vertex[static_cast<size_t>(j) * gw + i] = static_cast<int64_t>(mesh.positions.size());
            mesh.positions.push_back(ray * (grid.depth[p] / ray.z));
            mesh.uvs.push_back({(x + 0.5) / grid.width, (y + 0.5) / grid.height});
        }
    for (int j = 0; j + 1 < gh; ++j)
        for (int i = 0; i + 1 < gw; ++i) {
            int64_t a = vertex[static_cast<size_t>(j) * gw + i], b = vertex[static_cast<size_t>(j) * gw + i + 1];
            int64_t c = vertex[static_cast<size_t>(j + 1) * gw + i], d = vertex[static_cast<size_t>(j + 1) * gw + i + 1];
            if (a < 0 || b < 0 || c < 0 || d < 0) continue;
            // Wound so the face normal points back toward the camera.
            mesh.triangles.push_back({static_cast<uint32_t>(a), static_cast<uint32_t>(c), static_cast<uint32_t>(b)});
            mesh.triangles.push_back({static_cast<uint32_t>(b), static_cast<uint32_t>(c), static_cast<uint32_t>(d)});
        }
    if (mesh.triangles.empty()) throw ValidationError("mesh", "depth grid has no fully valid 2x2 cell");
    mesh.compute_vertex_normals();
    return mesh;
}

}  // namespace procam
