// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/error.h>
#include <procam/mesh.h>

#include <cmath>
#include <limits>
#include <string>

namespace procam {

void TriangleMesh::validate() const {
    if (normals.size() != positions.size()) throw ValidationError("mesh.normals", "count differs from positions");
    if (uvs.size() != positions.size()) throw ValidationError("mesh.uvs", "count differs from positions");
    for (size_t i = 0; i < normals.size(); ++i) {
        if (std::abs(length(normals[i]) - 1.0) > 1e-4)
            throw ValidationError("mesh.normals[" + std::to_string(i) + "]", "not unit length");
    }
    for (size_t t = 0; t < triangles.size(); ++t) {
        for (uint32_t idx : triangles[t]) {
            if (idx >= positions.size())
                throw ValidationError("mesh.triangles[" + std::to_string(t) + "]",
                                      "index " + std::to_string(idx) + " out of range");
        }
        const Vec2 &a = uvs[triangles[t][0]], &b = uvs[triangles[t][1]], &c = uvs[triangles[t][2]];
        double area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        if (std::abs(area) < 1e-14)
            throw ValidationError("mesh.uvs[triangle " + std::to_string(t) + "]", "degenerate uv triangle");
    }
}

double TriangleMesh::scene_scale() const {
    if (positions.empty()) return 1.0;
    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    Vec3 hi = -lo;
    for (const Vec3 &p : positions) {
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    double d = length(hi - lo);
    return d > 0.0 ? d : 1.0;
}

void TriangleMesh::compute_vertex_normals() {
    std::vector<Vec3> acc(positions.size(), Vec3{});
    for (const auto &tri : triangles) {
        Vec3 n = cross(positions[tri[1]] - positions[tri[0]], positions[tri[2]] - positions[tri[0]]);
        for (uint32_t idx : tri) acc[idx] += n;
    }
    normals.resize(positions.size());
    for (size_t i = 0; i < acc.size(); ++i) {
        double len = length(acc[i]);
        normals[i] = len > 0.0 ? acc[i] / len : Vec3{0.0, 0.0, -1.0};
    }
}

}  // namespace procam
