// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_MESH_H
#define PROCAM_MESH_H

#include <procam/math.h>

#include <array>
#include <cstdint>
#include <vector>

namespace procam {

// Indexed triangle mesh; positions, normals and uvs are per vertex and
// share the triangle index.
struct TriangleMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<Vec2> uvs;
    std::vector<std::array<uint32_t, 3>> triangles;

    size_t vertex_count() const { return positions.size(); }
    size_t triangle_count() const { return triangles.size(); }

    // Throws ValidationError on out-of-range indices, non-unit normals,
    // attribute count mismatches or zero-area UV triangles.
    void validate() const;

    // Bounding-box diagonal; the reference length for geometric epsilons.
    double scene_scale() const;

    // Area-weighted vertex normals following the triangle winding.
    void compute_vertex_normals();
};

}  // namespace procam

#endif  // PROCAM_MESH_H
