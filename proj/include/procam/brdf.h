// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_BRDF_H
#define PROCAM_BRDF_H

#include <procam/image.h>
#include <procam/math.h>

#include <optional>
#include <vector>

namespace procam {

// Principled BRDF restricted to base color, roughness and metallic.
//
//   f = (1 - metallic) * base / pi * (1 - Fd(n.l)) (1 - Fd(n.v)) / (1 - F0d)^2
//     + D G F / (4 |n.l| |n.v|)
//
// D is GGX with alpha = roughness^2, G the height-correlated Smith term,
// F Schlick on h.v with F0 = mix(F0d, base, metallic) and
// F90 = mix(F90d, 1, metallic), where F0d = 0.08 * specular and
// F90d = min(1, 50 * F0d). Fd is the dielectric Schlick Fresnel; the
// symmetric (1 - Fd) weights hand the energy reflected specularly at
// grazing angles back from the diffuse lobe while keeping f reciprocal.
// `specular` is a fixed scene constant (0.5 gives F0 = 0.04);
// specular = 0 with metallic = 0 is exactly Lambertian.
template <typename T>
struct MaterialPoint {
    Vector3<T> base_color;
    T roughness;
    T metallic;
};

inline constexpr double kMinAlpha = 1e-4;

namespace detail {

template <typename T>
T smith_lambda(const T &cos_theta, const T &alpha2) {
    using std::sqrt;
    T c2 = cos_theta * cos_theta;
    T tan2 = (T(1.0) - c2) / c2;
    return (sqrt(T(1.0) + alpha2 * tan2) - 1.0) * 0.5;
}

template <typename T>
T ggx_d(const T &cos_h, const T &alpha2) {
    T c2 = cos_h * cos_h;
    T denom = c2 * (alpha2 - 1.0) + 1.0;
    return alpha2 / (kPi * denom * denom);
}

// (1 - cos)^5
template <typename T>
T schlick_weight(const T &cos_theta) {
    T one_minus = max_of(T(1.0) - cos_theta, 0.0);
    T w2 = one_minus * one_minus;
    return w2 * w2 * one_minus;
}
template <typename T>
T material_alpha(const MaterialPoint<T> &m) {
    return max_of(m.roughness * m.roughness, kMinAlpha);
}

}  // namespace detail

// Returns zero when either direction is below the shading hemisphere.
template <typename T>
Vector3<T> brdf_eval(const Vector3<T> &n, const Vector3<T> &wo, const Vector3<T> &wi, const MaterialPoint<T> &m,
                     double specular) {
    T nl = dot(n, wi), nv = dot(n, wo);
    if (!(value_of(nl) > 0.0 && value_of(nv) > 0.0)) return {T(0.0), T(0.0), T(0.0)};
    Vector3<T> h = normalize(wi + wo);
    T nh = dot(n, h), vh = dot(wo, h);
    T alpha = detail::material_alpha(m);
    T a2 = alpha * alpha;
    T d = detail::ggx_d(nh, a2);
    T g = T(1.0) / (T(1.0) + detail::smith_lambda(nv, a2) + detail::smith_lambda(nl, a2));
    double f0d = 0.08 * specular;
    double f90d = std::min(1.0, 50.0 * f0d);
    T w5 = detail::schlick_weight(vh);
    T fd_l = T(f0d) + (f90d - f0d) * detail::schlick_weight(nl);
    T fd_v = T(f0d) + (f90d - f0d) * detail::schlick_weight(nv);
    T spec_common = d * g / (T(4.0) * nl * nv);
    T kd = (T(1.0) - m.metallic) * (T(1.0) - fd_l) * (T(1.0) - fd_v) * (kInvPi / ((1.0 - f0d) * (1.0 - f0d)));
    Vector3<T> r;
    for (int j = 0; j < 3; ++j) {
        T f0 = f0d * (T(1.0) - m.metallic) + m.base_color[j] * m.metallic;
        T f90 = f90d * (T(1.0) - m.metallic) + m.metallic;
        T f = f0 + (f90 - f0) * w5;
        r[j] = kd * m.base_color[j] + spec_common * f;
    }
    return r;
}

enum class Lobe { Diffuse, Specular };

struct BrdfSample {
    Vec3 wi;
    Vec3 value;  // f_r(wo, wi)
    double pdf = 0.0;
    Lobe lobe = Lobe::Diffuse;
};

// Probability of choosing the specular lobe, from the relative albedo
// estimate of both lobes at the outgoing direction.
double specular_lobe_probability(const Vec3 &n, const Vec3 &wo, const MaterialPoint<double> &m, double specular);

// Mixture sampler: cosine-weighted diffuse or GGX visible-normal
// reflection. `u` holds the lobe selector and two direction variates.
// Returns nothing when the sampled direction leaves the hemisphere.
std::optional<BrdfSample> brdf_sample(const Vec3 &n, const Vec3 &wo, const MaterialPoint<double> &m,
                                      double specular, const std::array<double, 3> &u);

// Density of brdf_sample over solid angle; zero below the hemisphere.
double brdf_pdf(const Vec3 &n, const Vec3 &wo, const Vec3 &wi, const MaterialPoint<double> &m, double specular);

// Anisotropic L1 total variation of one map: mean |horizontal texel
// difference| + mean |vertical texel difference| over all channels.
// When `grad` is non-null it receives d loss / d texel (sign subgradient,
// sign(0) = 0), added to whatever it already holds times `weight`.
double tv_loss(const Texture &map, std::vector<double> *grad = nullptr, double weight = 1.0);

}  // namespace procam

#endif  // PROCAM_BRDF_H
