// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_METRICS_H
#define PROCAM_METRICS_H

#include <procam/image.h>

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace procam {

// Identical images have infinite PSNR.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

double psnr(const SrgbImage &a, const SrgbImage &b);
// Per-channel SSIM with an 11x11 Gaussian window (sigma 1.5), data range 1,
// averaged over the window positions that fit inside the image and over
// the channels.
double ssim(const SrgbImage &a, const SrgbImage &b);
double mean_l1(const SrgbImage &a, const SrgbImage &b);
// Mean Euclidean RGB distance per pixel, times 100 (a rough stand-in for
// a perceptual color difference, not CIEDE2000).
double rgb_distance(const SrgbImage &a, const SrgbImage &b);

struct MetricsRow {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
    double l1 = 0.0;
    double rgb_distance = 0.0;
};

MetricsRow compare_images(const SrgbImage &a, const SrgbImage &b, std::string name = {});

struct MetricsReport {
    std::vector<MetricsRow> rows;

    // Mean over rows; an infinite PSNR row keeps the mean infinite.
    MetricsRow mean() const;
    void write_csv(const std::filesystem::path &path) const;
};

}  // namespace procam

#endif  // PROCAM_METRICS_H
