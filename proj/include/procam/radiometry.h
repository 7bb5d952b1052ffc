// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_RADIOMETRY_H
#define PROCAM_RADIOMETRY_H

#include <procam/math.h>

#include <algorithm>
#include <cmath>

namespace procam {

// Projector response: radiance = k * input^gamma per channel, with the
// input clamped to [0,1]. Gain and the per-pixel solid angle are folded
// into the intensity scale k.
inline Vec3 prf_apply(const Vec3 &input, const Vec3 &gamma, double k) {
    Vec3 r;
    for (int j = 0; j < 3; ++j) r[j] = k * std::pow(std::clamp(input[j], 0.0, 1.0), gamma[j]);
    return r;
}

inline double prf_channel(double input, double gamma, double k) {
    return k * std::pow(std::clamp(input, 0.0, 1.0), gamma);
}

// d/d input and d/d gamma of one channel. Both are defined as 0 at an
// input of exactly 0 (and above 1, where the clamp is flat).
inline double prf_d_input(double input, double gamma, double k) {
    if (input <= 0.0 || input > 1.0) return 0.0;
    return k * gamma * std::pow(input, gamma - 1.0);
}
inline double prf_d_gamma(double input, double gamma, double k) {
    if (input <= 0.0) return 0.0;
    double x = std::min(input, 1.0);
    return k * std::pow(x, gamma) * std::log(x);
}

struct CrfGradient {
    Vec3 d_irradiance;  // diagonal of d out / d E
    Vec3 d_white_balance;
    Vec3 d_gamma;
};

// Camera response: clamp((g_c * w * E)^gamma_c, 0, 1) per channel.
inline Vec3 crf_apply(const Vec3 &irradiance, double exposure, const Vec3 &white_balance, const Vec3 &gamma) {
    Vec3 r;
    for (int j = 0; j < 3; ++j) {
        double a = exposure * white_balance[j] * std::max(irradiance[j], 0.0);
        r[j] = a > 0.0 ? std::min(std::pow(a, gamma[j]), 1.0) : 0.0;
    }
    return r;
}

// Gradient of crf_apply. Saturated (>= 1) and zero-irradiance channels
// have zero gradient.
inline CrfGradient crf_gradient(const Vec3 &irradiance, double exposure, const Vec3 &white_balance,
                                const Vec3 &gamma) {
    CrfGradient g;
    for (int j = 0; j < 3; ++j) {
        double e = irradiance[j];
        double a = exposure * white_balance[j] * e;
        if (!(a > 0.0)) continue;
        double out = std::pow(a, gamma[j]);
        if (out >= 1.0) continue;
        double dout_da = gamma[j] * out / a;
        g.d_irradiance[j] = dout_da * exposure * white_balance[j];
        g.d_white_balance[j] = dout_da * exposure * e;
        g.d_gamma[j] = out * std::log(a);
    }
    return g;
}

// Per-sample radiance clip at k / min(w).
inline double radiance_clip_threshold(double k, const Vec3 &white_balance) {
    return k / min_component(white_balance);
}

inline Vec3 radiance_clip(const Vec3 &radiance, double k, const Vec3 &white_balance) {
    double thr = radiance_clip_threshold(k, white_balance);
    return {std::min(radiance.x, thr), std::min(radiance.y, thr), std::min(radiance.z, thr)};
}

}  // namespace procam

#endif  // PROCAM_RADIOMETRY_H
