// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/denoise.h>
#include <procam/error.h>
#include <procam/parallel.h>

#include <cmath>

namespace procam {

void DenoiseSettings::validate() const {
    if (radius < 0) throw ValidationError("denoise.radius", "must be non-negative");
    if (!(sigma_spatial > 0.0 && sigma_albedo > 0.0 && sigma_normal > 0.0))
        throw ValidationError("denoise.sigma", "must be positive");
    if (sigma_depth <= 0.0 && !(depth_fraction > 0.0))
        throw ValidationError("denoise.depth_fraction", "must be positive");
}

double DenoiseSettings::resolved_sigma_depth(const AuxBuffers &aux) const {
    if (sigma_depth > 0.0) return sigma_depth;
    double range = aux.depth_range();
    return range > 0.0 ? depth_fraction * range : 1.0;
}

namespace {

class Kernel {
public:
    Kernel(const AuxBuffers &aux, const DenoiseSettings &s)
        : aux_(aux), radius_(s.radius), inv_s_(0.5 / (s.sigma_spatial * s.sigma_spatial)),
          inv_a_(0.5 / (s.sigma_albedo * s.sigma_albedo)), inv_n_(0.5 / (s.sigma_normal * s.sigma_normal)) {
        double sd = s.resolved_sigma_depth(aux);
        inv_d_ = 0.5 / (sd * sd);
    }

    int radius() const { return radius_; }

    // Symmetric in (p, q).
    double weight(int px, int py, int qx, int qy) const {
        if (aux_.mask.at(px, py) != aux_.mask.at(qx, qy)) return 0.0;
        double dx = px - qx, dy = py - qy;
        double e = (dx * dx + dy * dy) * inv_s_;
        e += length_squared(aux_.albedo.rgb(px, py) - aux_.albedo.rgb(qx, qy)) * inv_a_;
        e += length_squared(aux_.normal.rgb(px, py) - aux_.normal.rgb(qx, qy)) * inv_n_;
        double dd = aux_.depth.at(px, py) - aux_.depth.at(qx, qy);
        e += dd * dd * inv_d_;
        return std::exp(-e);
    }

private:
    const AuxBuffers &aux_;
    int radius_;
    double inv_s_, inv_a_, inv_n_, inv_d_;
};

void check_shapes(const SrgbImage &img, const AuxBuffers &aux) {
    if (!aux.albedo.same_shape(img.width(), img.height()) || !aux.normal.same_shape(img.width(), img.height()) ||
        !aux.depth.same_shape(img.width(), img.height()) || !aux.mask.same_shape(img.width(), img.height()))
        throw ValidationError("denoise", "guidance buffers do not match the image resolution");
}

// out_p = sum_q w_pq in_q * scale_q / norm, where norm = sum_q w_pq when
// `normalize_at_p`, else 1.
SrgbImage filter(const SrgbImage &in, const Kernel &k, const std::vector<double> *scale, bool normalize_at_p,
                 std::vector<double> *norms, bool serial) {
    const int W = in.width(), H = in.height(), C = in.channels(), r = k.radius();
    SrgbImage out(W, H, C);
    parallel_for(
        H,
        [&](int64_t yy) {
            int y = static_cast<int>(yy);
            std::vector<double> acc(C);
            for (int x = 0; x < W; ++x) {
                std::fill(acc.begin(), acc.end(), 0.0);
                double z = 0.0;
                for (int qy = std::max(0, y - r); qy <= std::min(H - 1, y + r); ++qy)
                    for (int qx = std::max(0, x - r); qx <= std::min(W - 1, x + r); ++qx) {
                        double w = k.weight(x, y, qx, qy);
                        if (w == 0.0) continue;
                        z += w;
                        double sw = scale ? w * (*scale)[static_cast<size_t>(qy) * W + qx] : w;
                        for (int c = 0; c < C; ++c) acc[c] += sw * in.at(qx, qy, c);
                    }
                if (norms) (*norms)[static_cast<size_t>(y) * W + x] = z;
                double inv = normalize_at_p ? 1.0 / z : 1.0;
                for (int c = 0; c < C; ++c) out.at(x, y, c) = acc[c] * inv;
            }
        },
        serial);
    return out;
}

}  // namespace

SrgbImage denoise(const SrgbImage &noisy, const AuxBuffers &aux, const DenoiseSettings &settings, bool serial) {
    if (!settings.enabled || settings.radius == 0) return noisy;
    settings.validate();
    check_shapes(noisy, aux);
    Kernel k(aux, settings);
    return filter(noisy, k, nullptr, true, nullptr, serial);
}

SrgbImage denoise_backward(const SrgbImage &adjoint, const AuxBuffers &aux, const DenoiseSettings &settings,
                           bool serial) {
    if (!settings.enabled || settings.radius == 0) return adjoint;
    settings.validate();
    check_shapes(adjoint, aux);
    Kernel k(aux, settings);
    const int W = adjoint.width(), H = adjoint.height();
    // Normalizers Z_p, then d in_q = sum_p w_pq adj_p / Z_p by symmetry.
    std::vector<double> norms(static_cast<size_t>(W) * H);
    SrgbImage ones(W, H, 1, 1.0);
    filter(ones, k, nullptr, false, &norms, serial);
    std::vector<double> inv(norms.size());
    for (size_t i = 0; i < norms.size(); ++i) inv[i] = 1.0 / norms[i];
    return filter(adjoint, k, &inv, false, nullptr, serial);
}

}  // namespace procam
