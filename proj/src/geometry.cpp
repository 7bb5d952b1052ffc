// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/geometry.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace procam {

double determinant(const Mat3 &a) {
    const auto &m = a.m;
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse(const Mat3 &a, double eps) {
    double det = determinant(a);
    if (!(std::abs(det) > eps)) throw std::domain_error("singular 3x3 matrix");
    const auto &m = a.m;
    Mat3 r;
    r.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    r.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    r.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    r.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    r.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    r.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    r.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    r.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    r.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return r;
}

void SurfaceHit::face_toward(const Vec3 &wo) {
    if (dot(geometric_normal, wo) >= 0.0) return;
    geometric_normal = -geometric_normal;
    interpolated_normal = -interpolated_normal;
    shading_normal = -shading_normal;
    bitangent = -bitangent;
}

std::optional<TriangleHit> intersect_triangle(const TriangleMesh &mesh, uint32_t triangle, const Ray &ray) {
    const auto &tri = mesh.triangles[triangle];
    const Vec3 &p0 = mesh.positions[tri[0]];
    Vec3 e1 = mesh.positions[tri[1]] - p0;
    Vec3 e2 = mesh.positions[tri[2]] - p0;
    Vec3 pvec = cross(ray.direction, e2);
    double det = dot(e1, pvec);
    // Parallel (or degenerate) configurations never report a hit.
    if (std::abs(det) <= 1e-14 * length(e1) * length(e2)) return std::nullopt;
    double inv_det = 1.0 / det;
    Vec3 tvec = ray.origin - p0;
    double b1 = dot(tvec, pvec) * inv_det;
    if (b1 < 0.0 || b1 > 1.0) return std::nullopt;
    Vec3 qvec = cross(tvec, e1);
    double b2 = dot(ray.direction, qvec) * inv_det;
    if (b2 < 0.0 || b1 + b2 > 1.0) return std::nullopt;
    double t = dot(e2, qvec) * inv_det;
    if (!(t > ray.t_min && t < ray.t_max)) return std::nullopt;
    return TriangleHit{triangle, t, b1, b2};
}

namespace {

bool closer(const TriangleHit &a, const std::optional<TriangleHit> &best) {
    return !best || a.t < best->t || (a.t == best->t && a.triangle < best->triangle);
}

}  // namespace

std::optional<TriangleHit> intersect_brute_force(const TriangleMesh &mesh, const Ray &ray) {
    std::optional<TriangleHit> best;
    for (uint32_t i = 0; i < mesh.triangles.size(); ++i) {
        auto h = intersect_triangle(mesh, i, ray);
        if (h && closer(*h, best)) best = h;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Bvh

namespace {

constexpr int kBins = 12;
constexpr uint32_t kLeafSize = 4;

struct Bounds {
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};

    void grow(const Vec3 &p) {
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    void grow(const Bounds &b) {
        grow(b.lo);
        grow(b.hi);
    }
    double area() const {
        Vec3 d = hi - lo;
        if (d.x < 0.0) return 0.0;
        return 2.0 * (d.x * d.y + d.y * d.z + d.z * d.x);
    }
};

bool hit_box(const Vec3 &lo, const Vec3 &hi, const Vec3 &origin, const Vec3 &inv_dir, double t_min,
             double t_max) {
    for (int k = 0; k < 3; ++k) {
        double t0 = (lo[k] - origin[k]) * inv_dir[k];
        double t1 = (hi[k] - origin[k]) * inv_dir[k];
        if (t0 > t1) std::swap(t0, t1);
        // Rounding can shave the far plane; widen slightly so triangles
        // lying in an AABB face are never culled.
        t1 *= 1.0 + 2e-15;
        t_min = t0 > t_min ? t0 : t_min;
        t_max = t1 < t_max ? t1 : t_max;
        if (t_min > t_max) return false;
    }
    return true;
}

}  // namespace

Bvh::Bvh(const TriangleMesh &mesh) : mesh_(&mesh) {
    uint32_t n = static_cast<uint32_t>(mesh.triangles.size());
    std::vector<uint32_t> prims(n);
    std::vector<Vec3> centroids(n), lo(n), hi(n);
    for (uint32_t i = 0; i < n; ++i) {
        prims[i] = i;
        Bounds b;
        for (uint32_t idx : mesh.triangles[i]) b.grow(mesh.positions[idx]);
        lo[i] = b.lo;
        hi[i] = b.hi;
        centroids[i] = (b.lo + b.hi) * 0.5;
    }
    nodes_.reserve(n > 0 ? 2 * n : 1);
    if (n > 0) build(prims, centroids, lo, hi, 0, n);
    order_ = std::move(prims);
}

uint32_t Bvh::build(std::vector<uint32_t> &prims, std::vector<Vec3> &centroids, std::vector<Vec3> &lo,
                    std::vector<Vec3> &hi, uint32_t begin, uint32_t end) {
    uint32_t node_index = static_cast<uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Bounds bounds, cbounds;
    for (uint32_t i = begin; i < end; ++i) {
        bounds.grow(lo[prims[i]]);
        bounds.grow(hi[prims[i]]);
        cbounds.grow(centroids[prims[i]]);
    }
    nodes_[node_index].lo = bounds.lo;
    nodes_[node_index].hi = bounds.hi;
    uint32_t count = end - begin;

    auto make_leaf = [&] {
        nodes_[node_index].offset = begin;
        nodes_[node_index].count = static_cast<uint16_t>(count);
        return node_index;
    };
    if (count <= kLeafSize) return make_leaf();

    Vec3 extent = cbounds.hi - cbounds.lo;
    int axis = extent.x > extent.y ? (extent.x > extent.z ? 0 : 2) : (extent.y > extent.z ? 1 : 2);
    uint32_t mid;
    if (extent[axis] <= 0.0) {
        // All centroids coincide; split by count.
        mid = begin + count / 2;
    } else {
        std::array<Bounds, kBins> bin_bounds;
        std::array<uint32_t, kBins> bin_count{};
        auto bin_of = [&](uint32_t p) {
            int b = static_cast<int>(kBins * (centroids[p][axis] - cbounds.lo[axis]) / extent[axis]);
            return std::clamp(b, 0, kBins - 1);
        };
        for (uint32_t i = begin; i < end; ++i) {
            int b = bin_of(prims[i]);
            ++bin_count[b];
            bin_bounds[b].grow(lo[prims[i]]);
            bin_bounds[b].grow(hi[prims[i]]);
        }
        double best_cost = 1e300;
        int best_split = -1;
        for (int s = 0; s < kBins - 1; ++s) {
            Bounds left, right;
            uint32_t nl = 0, nr = 0;
            for (int b = 0; b <= s; ++b) {
                if (bin_count[b]) left.grow(bin_bounds[b]);
                nl += bin_count[b];
            }
            for (int b = s + 1; b < kBins; ++b) {
                if (bin_count[b]) right.grow(bin_bounds[b]);
                nr += bin_count[b];
            }
            if (nl == 0 || nr == 0) continue;
            double cost = left.area() * nl + right.area() * nr;
            if (cost < best_cost) {
                best_cost = cost;
                best_split = s;
            }
        }
        if (best_split < 0) {
            mid = begin + count / 2;
            std::nth_element(prims.begin() + begin, prims.begin() + mid, prims.begin() + end,
                             [&](uint32_t a, uint32_t b) { return centroids[a][axis] < centroids[b][axis]; });
        } else {
            auto it = std::partition(prims.begin() + begin, prims.begin() + end,
                                     [&](uint32_t p) { return bin_of(p) <= best_split; });
            mid = static_cast<uint32_t>(it - prims.begin());
            if (mid == begin || mid == end) mid = begin + count / 2;
        }
    }
    nodes_[node_index].axis = static_cast<uint8_t>(axis);
    build(prims, centroids, lo, hi, begin, mid);
    uint32_t right = build(prims, centroids, lo, hi, mid, end);
    nodes_[node_index].offset = right;
    nodes_[node_index].count = 0;
    return node_index;
}

std::optional<TriangleHit> Bvh::intersect(const Ray &ray) const {
    std::optional<TriangleHit> best;
    if (nodes_.empty()) return best;
    Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    std::array<uint32_t, 64> stack;
    int top = 0;
    stack[top++] = 0;
    Ray r = ray;
    while (top > 0) {
        const Node &node = nodes_[stack[--top]];
        // Inclusive t_max keeps equal-t ties visible for the id tie-break.
        double t_far = best ? best->t : r.t_max;
        if (!hit_box(node.lo, node.hi, r.origin, inv, r.t_min, t_far)) continue;
        if (node.count > 0) {
            for (uint32_t i = node.offset; i < node.offset + node.count; ++i) {
                auto h = intersect_triangle(*mesh_, order_[i], r);
                if (h && closer(*h, best)) best = h;
            }
        } else {
            uint32_t left = static_cast<uint32_t>(&node - nodes_.data()) + 1;
            uint32_t right = node.offset;
            // Visit the near child first.
            if (ray.direction[node.axis] < 0.0) std::swap(left, right);
            stack[top++] = right;
            stack[top++] = left;
        }
    }
    return best;
}

bool Bvh::occluded(const Ray &ray) const {
    if (nodes_.empty()) return false;
    Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    std::array<uint32_t, 64> stack;
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node &node = nodes_[stack[--top]];
        if (!hit_box(node.lo, node.hi, ray.origin, inv, ray.t_min, ray.t_max)) continue;
        if (node.count > 0) {
            for (uint32_t i = node.offset; i < node.offset + node.count; ++i)
                if (intersect_triangle(*mesh_, order_[i], ray)) return true;
        } else {
            stack[top++] = node.offset;
            stack[top++] = static_cast<uint32_t>(&node - nodes_.data()) + 1;
        }
    }
    return false;
}

SurfaceHit make_surface_hit(const TriangleMesh &mesh, const Ray &ray, const TriangleHit &th) {
    const auto &tri = mesh.triangles[th.triangle];
    double b0 = 1.0 - th.b1 - th.b2;
    SurfaceHit h;
    h.triangle = th.triangle;
    h.t = th.t;
    h.b1 = th.b1;
    h.b2 = th.b2;
    h.point = ray.origin + ray.direction * th.t;
    const Vec3 &p0 = mesh.positions[tri[0]], &p1 = mesh.positions[tri[1]], &p2 = mesh.positions[tri[2]];
    Vec3 e1 = p1 - p0, e2 = p2 - p0;
    h.geometric_normal = normalize(cross(e1, e2));
    Vec3 n = mesh.normals[tri[0]] * b0 + mesh.normals[tri[1]] * th.b1 + mesh.normals[tri[2]] * th.b2;
    double nl = length(n);
    h.interpolated_normal = nl > 1e-12 ? n / nl : h.geometric_normal;
    const Vec2 &uv0 = mesh.uvs[tri[0]], &uv1 = mesh.uvs[tri[1]], &uv2 = mesh.uvs[tri[2]];
    h.uv = {uv0.x * b0 + uv1.x * th.b1 + uv2.x * th.b2, uv0.y * b0 + uv1.y * th.b1 + uv2.y * th.b2};

    // Tangent frame from uv derivatives, Gram-Schmidt against the normal.
    double du1 = uv1.x - uv0.x, dv1 = uv1.y - uv0.y;
    double du2 = uv2.x - uv0.x, dv2 = uv2.y - uv0.y;
    double det = du1 * dv2 - du2 * dv1;
    const Vec3 &N = h.interpolated_normal;
    bool have_frame = false;
    if (std::abs(det) > 1e-14) {
        Vec3 dpdu = (e1 * dv2 - e2 * dv1) / det;
        Vec3 dpdv = (e2 * du1 - e1 * du2) / det;
        Vec3 t = dpdu - N * dot(N, dpdu);
        double tl = length(t);
        if (tl > 1e-12) {
            h.tangent = t / tl;
            h.bitangent = cross(N, h.tangent);
            if (dot(h.bitangent, dpdv) < 0.0) h.bitangent = -h.bitangent;
            have_frame = true;
        }
    }
    if (!have_frame) orthonormal_basis(N, h.tangent, h.bitangent);
    h.shading_normal = h.interpolated_normal;
    return h;
}

std::optional<SurfaceHit> intersect(const Bvh &bvh, const TriangleMesh &mesh, const Ray &ray) {
    auto th = bvh.intersect(ray);
    if (!th) return std::nullopt;
    return make_surface_hit(mesh, ray, *th);
}

Vec2 project(const Vec3 &x, const Mat3 &K, const Mat3 &r, const Vec3 &t) {
    Vec3 q = r * x + t;
    if (!(q.z > 0.0)) throw BehindDeviceError();
    auto p = project_device(q, K);
    return {p.x, p.y};
}

Vec3 unproject(const Vec2 &pixel, const Mat3 &K) {
    Mat3 inv = inverse(K);
    return normalize(inv * Vec3{pixel.x, pixel.y, 1.0});
}

Vec3 shading_normal(const SurfaceHit &hit, const Texture &normal_map) {
    auto taps = normal_map.taps(hit.uv.x, hit.uv.y);
    Vec3 enc{normal_map.lookup(taps, 0), normal_map.lookup(taps, 1), normal_map.lookup(taps, 2)};
    return perturb_normal(enc, hit.tangent, hit.bitangent, hit.interpolated_normal, hit.geometric_normal);
}

}  // namespace procam
