// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_STRUCTURED_LIGHT_H
#define PROCAM_STRUCTURED_LIGHT_H

#include <procam/image.h>
#include <procam/math.h>
#include <procam/mesh.h>

#include <cstdint>
#include <vector>

namespace procam {

inline uint32_t gray_encode(uint32_t v) { return v ^ (v >> 1); }
inline uint32_t gray_decode(uint32_t g) {
    for (uint32_t shift = 1; shift < 32; shift <<= 1) g ^= g >> shift;
    return g;
}

// Bits needed to code `n` distinct indices (ceil(log2 n), at least 1).
int code_bits(int n);

enum class PatternAxis { Columns, Rows };

// Sequence layout: all-white, all-black, then for columns and then rows
// each bit plane (most significant first) followed by its complement.
class GrayCodeSet {
public:
    GrayCodeSet(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    int bits_x() const { return bits_x_; }
    int bits_y() const { return bits_y_; }
    int count() const { return 2 + 2 * (bits_x_ + bits_y_); }

    // Pattern `index` as a projector input image (values 0 or 1).
    SrgbImage pattern(int index) const;

private:
    int width_, height_, bits_x_, bits_y_;
};

// Convenience: materializes every pattern.
std::vector<SrgbImage> generate_patterns(int width, int height);

struct DecodeThresholds {
    double bit_contrast = 0.02;    // |capture - complement|
    double white_black = 0.1;      // white - black reference
};

// Per-camera-pixel projector coordinates at projector pixel centers.
struct CorrespondenceMap {
    int width = 0, height = 0;
    std::vector<double> projector_x, projector_y;
    std::vector<uint8_t> valid;

    size_t valid_count() const;
};

// Captures are in pattern order; multi-channel captures are averaged.
CorrespondenceMap decode(const std::vector<SrgbImage> &captures, const GrayCodeSet &set,
                         const DecodeThresholds &thresholds = {}, bool serial = false);

struct DepthGrid {
    int width = 0, height = 0;
    std::vector<double> depth;  // camera z
    std::vector<uint8_t> valid;
    std::vector<Vec3> points;   // valid pixels in row-major order
};

// Midpoint of the closest approach between the camera ray and the
// projector ray; near-parallel pairs and a zero baseline are invalid.
DepthGrid triangulate(const CorrespondenceMap &map, const Mat3 &camera_k, const Mat3 &projector_k,
                      const Mat3 &projector_r, const Vec3 &projector_t);

// One vertex per valid (strided) pixel, two triangles per fully valid
// cell, uv = normalized camera pixel position. Throws ValidationError
// when no cell is fully valid.
TriangleMesh mesh_from_depth(const DepthGrid &grid, const Mat3 &camera_k, int stride = 1);

}  // namespace procam

#endif  // PROCAM_STRUCTURED_LIGHT_H
