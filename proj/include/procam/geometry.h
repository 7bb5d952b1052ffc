// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_GEOMETRY_H
#define PROCAM_GEOMETRY_H

#include <procam/image.h>
#include <procam/math.h>
#include <procam/mesh.h>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace procam {

class BehindDeviceError : public std::domain_error {
public:
    BehindDeviceError() : std::domain_error("point is behind the device (depth <= 0)") {}
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();
};

// Nearest-hit record returned by the acceleration structure.
struct TriangleHit {
    uint32_t triangle = 0;
    double t = 0.0;
    double b1 = 0.0, b2 = 0.0;  // barycentrics of vertices 1 and 2
};

struct SurfaceHit {
    Vec3 point;
    Vec3 geometric_normal;     // from the triangle winding
    Vec3 interpolated_normal;  // barycentric blend of vertex normals
    Vec3 shading_normal;       // after normal-map perturbation
    Vec3 tangent, bitangent;   // orthonormal with interpolated_normal
    Vec2 uv;
    uint32_t triangle = 0;
    double t = 0.0;
    double b1 = 0.0, b2 = 0.0;

    // Flips the whole frame so the geometric normal faces `wo`.
    void face_toward(const Vec3 &wo);
};

// Binned-SAH bounding volume hierarchy over a TriangleMesh. The mesh is
// not owned and must outlive the Bvh.
class Bvh {
public:
    struct Node {
        Vec3 lo, hi;
        uint32_t offset = 0;  // first primitive (leaf) or right child (interior)
        uint16_t count = 0;   // primitives in leaf; 0 for interior nodes
        uint8_t axis = 0;
    };

    Bvh() = default;
    explicit Bvh(const TriangleMesh &mesh);

    std::optional<TriangleHit> intersect(const Ray &ray) const;
    bool occluded(const Ray &ray) const;

    const std::vector<Node> &nodes() const { return nodes_; }
    const std::vector<uint32_t> &primitive_order() const { return order_; }
    const TriangleMesh *mesh() const { return mesh_; }

private:
    uint32_t build(std::vector<uint32_t> &prims, std::vector<Vec3> &centroids, std::vector<Vec3> &lo,
                   std::vector<Vec3> &hi, uint32_t begin, uint32_t end);

    const TriangleMesh *mesh_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<uint32_t> order_;
};

// Moller-Trumbore with inclusive edges; shared by the Bvh and the
// brute-force reference so both yield bitwise-identical t values.
std::optional<TriangleHit> intersect_triangle(const TriangleMesh &mesh, uint32_t triangle, const Ray &ray);

// Serial reference: tests every triangle. Ties on t go to the lower id.
std::optional<TriangleHit> intersect_brute_force(const TriangleMesh &mesh, const Ray &ray);

SurfaceHit make_surface_hit(const TriangleMesh &mesh, const Ray &ray, const TriangleHit &hit);

std::optional<SurfaceHit> intersect(const Bvh &bvh, const TriangleMesh &mesh, const Ray &ray);

// Pixel of a world point under x_pix ~ K (r x + t). Throws
// BehindDeviceError when the transformed depth is not positive.
Vec2 project(const Vec3 &x, const Mat3 &K, const Mat3 &r, const Vec3 &t);

// Unit direction in device coordinates through a pixel position.
// Throws std::domain_error for a singular K.
Vec3 unproject(const Vec2 &pixel, const Mat3 &K);

// Decodes the tangent-space normal map at the hit and perturbs the
// interpolated normal; decoded (0,0,1) leaves it unchanged.
Vec3 shading_normal(const SurfaceHit &hit, const Texture &normal_map);

// ---------------------------------------------------------------------------
// Scalar-generic pieces used by the differentiable paths.

template <typename T>
struct PlaneHit {
    Vector3<T> point;
    T b1, b2, t;
};

// Intersection of a ray with the plane of a triangle expressed in the
// triangle's barycentric coordinates (no inside test).
template <typename T>
PlaneHit<T> intersect_triangle_plane(const TriangleMesh &mesh, uint32_t triangle, const Vector3<T> &origin,
                                     const Vector3<T> &direction) {
    const auto &tri = mesh.triangles[triangle];
    Vector3<T> p0(mesh.positions[tri[0]]);
    Vector3<T> e1(mesh.positions[tri[1]] - mesh.positions[tri[0]]);
    Vector3<T> e2(mesh.positions[tri[2]] - mesh.positions[tri[0]]);
    Vector3<T> pvec = cross(direction, e2);
    T inv_det = T(1.0) / dot(e1, pvec);
    Vector3<T> tvec = origin - p0;
    Vector3<T> qvec = cross(tvec, e1);
    PlaneHit<T> h;
    h.b1 = dot(tvec, pvec) * inv_det;
    h.b2 = dot(direction, qvec) * inv_det;
    h.t = dot(e2, qvec) * inv_det;
    h.point = origin + direction * h.t;
    return h;
}

template <typename T>
Vector3<T> perturb_normal(const Vector3<T> &encoded, const Vec3 &tangent, const Vec3 &bitangent,
                          const Vec3 &normal, const Vec3 &geometric_normal) {
    Vector3<T> d(encoded.x * 2.0 - 1.0, encoded.y * 2.0 - 1.0, encoded.z * 2.0 - 1.0);
    Vector3<T> n = Vector3<T>(tangent) * d.x + Vector3<T>(bitangent) * d.y + Vector3<T>(normal) * d.z;
    T len = length(n);
    if (value_of(len) < 1e-12) return Vector3<T>(normal);
    n = n / len;
    if (value_of(dot(n, Vector3<T>(geometric_normal))) < 0.0) n = -n;
    return n;
}

template <typename T>
struct DevicePixel {
    T x, y;
    T depth;  // z in the device frame
};

// Pinhole projection of a point already expressed in the device frame.
template <typename T>
DevicePixel<T> project_device(const Vector3<T> &q, const Mat3 &K) {
    Vector3<T> p(K.m[0][0] * q.x + K.m[0][1] * q.y + K.m[0][2] * q.z,
                 K.m[1][0] * q.x + K.m[1][1] * q.y + K.m[1][2] * q.z,
                 K.m[2][0] * q.x + K.m[2][1] * q.y + K.m[2][2] * q.z);
    return {p.x / p.z, p.y / p.z, q.z};
}

}  // namespace procam

#endif  // PROCAM_GEOMETRY_H
