// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_DENOISE_H
#define PROCAM_DENOISE_H

#include <procam/image.h>
#include <procam/render.h>

namespace procam {

struct DenoiseSettings {
    bool enabled = true;
    int radius = 3;
    double sigma_spatial = 2.0;  // pixels
    double sigma_albedo = 0.1;
    double sigma_normal = 0.2;
    // Depth sigma; non-positive means depth_fraction * depth range of the
    // guidance buffer.
    double sigma_depth = 0.0;
    double depth_fraction = 0.05;

    void validate() const;
    double resolved_sigma_depth(const AuxBuffers &aux) const;
};

// Cross-bilateral filter guided by the (constant) auxiliary buffers.
// Pixels whose primary-hit mask differs never mix. Returns the input
// unchanged when disabled.
SrgbImage denoise(const SrgbImage &noisy, const AuxBuffers &aux, const DenoiseSettings &settings,
                  bool serial = false);

// Transpose of the filter applied to an output adjoint.
SrgbImage denoise_backward(const SrgbImage &adjoint, const AuxBuffers &aux, const DenoiseSettings &settings,
                           bool serial = false);

}  // namespace procam

#endif  // PROCAM_DENOISE_H
