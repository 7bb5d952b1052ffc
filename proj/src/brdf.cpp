// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/brdf.h>

#include <algorithm>
#include <cmath>

namespace procam {

namespace {

struct LocalFrame {
    Vec3 t, b, n;
    Vec3 to_local(const Vec3 &v) const { return {dot(v, t), dot(v, b), dot(v, n)}; }
    Vec3 to_world(const Vec3 &v) const { return t * v.x + b * v.y + n * v.z; }
};

LocalFrame frame_of(const Vec3 &n) {
    LocalFrame f;
    f.n = n;
    orthonormal_basis(n, f.t, f.b);
    return f;
}

double clamp_unit(double u) { return std::clamp(u, 0.0, 1.0 - 0x1.0p-53); }

double g1(double cos_theta, double alpha2) {
    return 1.0 / (1.0 + detail::smith_lambda(cos_theta, alpha2));
}

// Heitz 2018, isotropic.
Vec3 sample_visible_normal(const Vec3 &wo_local, double alpha, double u1, double u2) {
    Vec3 vh = normalize(Vec3{alpha * wo_local.x, alpha * wo_local.y, wo_local.z});
    double lensq = vh.x * vh.x + vh.y * vh.y;
    Vec3 t1 = lensq > 0.0 ? Vec3{-vh.y, vh.x, 0.0} / std::sqrt(lensq) : Vec3{1.0, 0.0, 0.0};
    Vec3 t2 = cross(vh, t1);
    double r = std::sqrt(u1);
    double phi = 2.0 * kPi * u2;
    double p1 = r * std::cos(phi);
    double p2 = r * std::sin(phi);
    double s = 0.5 * (1.0 + vh.z);
    p2 = (1.0 - s) * std::sqrt(std::max(0.0, 1.0 - p1 * p1)) + s * p2;
    Vec3 nh = t1 * p1 + t2 * p2 + vh * std::sqrt(std::max(0.0, 1.0 - p1 * p1 - p2 * p2));
    return normalize(Vec3{alpha * nh.x, alpha * nh.y, std::max(1e-7, nh.z)});
}

double specular_pdf_local(const Vec3 &wo, const Vec3 &wi, double alpha) {
    if (wi.z <= 0.0 || wo.z <= 0.0) return 0.0;
    Vec3 h = normalize(wo + wi);
    if (dot(wo, h) <= 0.0) return 0.0;
    double a2 = alpha * alpha;
    return g1(wo.z, a2) * detail::ggx_d(h.z, a2) / (4.0 * wo.z);
}

}  // namespace

double specular_lobe_probability(const Vec3 &n, const Vec3 &wo, const MaterialPoint<double> &m, double specular) {
    double nv = std::clamp(dot(n, wo), 0.0, 1.0);
    double w5 = std::pow(1.0 - nv, 5.0);
    double f0d = 0.08 * specular;
    double f90d = std::min(1.0, 50.0 * f0d);
    Vec3 f;
    for (int j = 0; j < 3; ++j) {
        double f0 = f0d * (1.0 - m.metallic) + m.base_color[j] * m.metallic;
        double f90 = f90d * (1.0 - m.metallic) + m.metallic;
        f[j] = f0 + (f90 - f0) * w5;
    }
    double spec = luminance(f);
    double diff = (1.0 - m.metallic) * luminance(m.base_color) * (1.0 - (f0d + (f90d - f0d) * w5));
    double total = spec + diff;
    if (!(total > 0.0)) return 0.5;
    return spec / total;
}

std::optional<BrdfSample> brdf_sample(const Vec3 &n, const Vec3 &wo, const MaterialPoint<double> &m,
                                      double specular, const std::array<double, 3> &u) {
    if (dot(n, wo) <= 0.0) return std::nullopt;
    LocalFrame frame = frame_of(n);
    Vec3 wo_l = frame.to_local(wo);
    double p_spec = specular_lobe_probability(n, wo, m, specular);
    double u1 = clamp_unit(u[1]), u2 = clamp_unit(u[2]);
    Vec3 wi_l;
    BrdfSample s;
    if (u[0] < p_spec) {
        double alpha = detail::material_alpha(m);
        Vec3 h = sample_visible_normal(wo_l, alpha, u1, u2);
        wi_l = h * (2.0 * dot(wo_l, h)) - wo_l;
        s.lobe = Lobe::Specular;
    } else {
        double r = std::sqrt(u1);
        double phi = 2.0 * kPi * u2;
        wi_l = {r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
        s.lobe = Lobe::Diffuse;
    }
    if (wi_l.z <= 0.0) return std::nullopt;
    s.wi = normalize(frame.to_world(wi_l));
    s.pdf = brdf_pdf(n, wo, s.wi, m, specular);
    if (!(s.pdf > 0.0)) return std::nullopt;
    s.value = brdf_eval(n, wo, s.wi, m, specular);
    return s;
}

double brdf_pdf(const Vec3 &n, const Vec3 &wo, const Vec3 &wi, const MaterialPoint<double> &m, double specular) {
    double nl = dot(n, wi), nv = dot(n, wo);
    if (nl <= 0.0 || nv <= 0.0) return 0.0;
    double p_spec = specular_lobe_probability(n, wo, m, specular);
    LocalFrame frame = frame_of(n);
    double spec = p_spec > 0.0 ? specular_pdf_local(frame.to_local(wo), frame.to_local(wi), detail::material_alpha(m))
                               : 0.0;
    return (1.0 - p_spec) * nl * kInvPi + p_spec * spec;
}

double tv_loss(const Texture &map, std::vector<double> *grad, double weight) {
    int w = map.width(), h = map.height(), c = map.channels();
    if (grad && grad->size() != map.values().size()) grad->assign(map.values().size(), 0.0);
    const auto &v = map.values();
    auto idx = [&](int x, int y, int ch) { return (static_cast<size_t>(y) * w + x) * c + ch; };
    auto sign = [](double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); };
    double sum_h = 0.0, sum_v = 0.0;
    size_t n_h = static_cast<size_t>(std::max(w - 1, 0)) * h * c;
    size_t n_v = static_cast<size_t>(w) * std::max(h - 1, 0) * c;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x + 1 < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double d = v[idx(x + 1, y, ch)] - v[idx(x, y, ch)];
                sum_h += std::abs(d);
                if (grad) {
                    double g = weight * sign(d) / static_cast<double>(n_h);
                    (*grad)[idx(x + 1, y, ch)] += g;
                    (*grad)[idx(x, y, ch)] -= g;
                }
            }
    for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double d = v[idx(x, y + 1, ch)] - v[idx(x, y, ch)];
                sum_v += std::abs(d);
                if (grad) {
                    double g = weight * sign(d) / static_cast<double>(n_v);
                    (*grad)[idx(x, y + 1, ch)] += g;
                    (*grad)[idx(x, y, ch)] -= g;
                }
            }
    double loss = 0.0;
    if (n_h > 0) loss += sum_h / static_cast<double>(n_h);
    if (n_v > 0) loss += sum_v / static_cast<double>(n_v);
    return loss;
}

}  // namespace procam
