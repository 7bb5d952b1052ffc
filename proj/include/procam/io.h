// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_IO_H
#define PROCAM_IO_H

#include <procam/image.h>

#include <filesystem>
#include <vector>

namespace procam {

struct TriangleMesh;

// Portable float map: "PF" (RGB) or "Pf" (gray) header, 32-bit floats,
// little-endian (negative scale), rows stored bottom-to-top.
template <typename Space>
void write_pfm(const std::filesystem::path &path, const Image<Space> &image);
LinearImage read_pfm(const std::filesystem::path &path);

void write_texture_pfm(const std::filesystem::path &path, const Texture &texture);
Texture read_texture_pfm(const std::filesystem::path &path);

// 8-bit PNG. Values are clamped to [0,1] and rounded on write; on read,
// gray and RGBA inputs are expanded/truncated to RGB.
void write_png(const std::filesystem::path &path, const SrgbImage &image);
SrgbImage read_png(const std::filesystem::path &path);

// Wavefront OBJ with v/vt/vn/f records. Faces are triangulated as fans;
// distinct (v, vt, vn) index triples become distinct vertices.
TriangleMesh read_obj(const std::filesystem::path &path);
void write_obj(const std::filesystem::path &path, const TriangleMesh &mesh);

// ASCII PLY point cloud.
void write_ply(const std::filesystem::path &path, const std::vector<Vec3> &points);

}  // namespace procam

#endif  // PROCAM_IO_H
