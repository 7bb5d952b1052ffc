// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include "path.h"

#include <procam/autodiff.h>
#include <procam/error.h>
#include <procam/parallel.h>
#include <procam/radiometry.h>

#include <cmath>

namespace procam {

GradientRequest GradientRequest::all() {
    GradientRequest r;
    r.params.fill(true);
    return r;
}

GradientRequest GradientRequest::none() { return {}; }

bool GradientRequest::wants_materials() const {
    return wants(ParamId::BaseColor) || wants(ParamId::Roughness) || wants(ParamId::Metallic) ||
           wants(ParamId::NormalMap);
}

ParamGrads ParamGrads::zeros_like(const Scene &scene, const GradientRequest &request) {
    ParamGrads g;
    for (ParamId id : kAllParams)
        if (request.wants(id)) g[id].assign(scene.params.block(id).size(), 0.0);
    if (request.projector_input)
        g.projector_input.assign(static_cast<size_t>(scene.projector.width) * scene.projector.height * 3, 0.0);
    return g;
}

void ParamGrads::add(const ParamGrads &other) {
    auto add_vec = [](std::vector<double> &a, const std::vector<double> &b) {
        if (b.empty()) return;
        if (a.empty()) a.assign(b.size(), 0.0);
        if (a.size() != b.size()) throw std::invalid_argument("gradient shape mismatch");
        for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    for (int i = 0; i < kParamCount; ++i) add_vec(param[i], other.param[i]);
    add_vec(projector_input, other.projector_input);
}

void ParamGrads::scale(double s) {
    for (auto &p : param)
        for (double &v : p) v *= s;
    for (double &v : projector_input) v *= s;
}

bool ParamGrads::all_finite() const {
    for (const auto &p : param)
        for (double v : p)
            if (!std::isfinite(v)) return false;
    for (double v : projector_input)
        if (!std::isfinite(v)) return false;
    return true;
}

GradientTape::GradientTape(const Scene &scene, const GradientRequest &request)
    : request_(request), grads_(ParamGrads::zeros_like(scene, request)) {}

void GradientTape::zero() {
    for (auto &p : grads_.param) std::fill(p.begin(), p.end(), 0.0);
    std::fill(grads_.projector_input.begin(), grads_.projector_input.end(), 0.0);
}

void GradientTape::accumulate(const ParamGrads &grads) { grads_.add(grads); }

namespace {

// Dual-number slots: base color (3), roughness, metallic, encoded normal
// (3), then the camera pose increment (rotation 3, translation 3).
constexpr int kMaterialSlots = 8;
constexpr int kPoseSlots = 6;

template <int N>
using DVec = Vector3<Dual<N>>;

template <int N, typename T>
DVec<N> mat_mul(const Mat3 &m, const Vector3<T> &v) {
    return {v.x * m.m[0][0] + v.y * m.m[0][1] + v.z * m.m[0][2], v.x * m.m[1][0] + v.y * m.m[1][1] + v.z * m.m[1][2],
            v.x * m.m[2][0] + v.y * m.m[2][1] + v.z * m.m[2][2]};
}

struct MaterialTaps {
    BilinearTaps<double> base, rough, metal, normal;
};

MaterialTaps material_taps(const SceneParams &p, const Vec2 &uv) {
    return {p.base_color().taps(uv.x, uv.y), p.roughness().taps(uv.x, uv.y), p.metallic().taps(uv.x, uv.y),
            p.normal_map().taps(uv.x, uv.y)};
}

// Material values at a uv (possibly carrying pose derivatives), each
// seeded with its own slot.
template <int N, typename U>
void seeded_material(const SceneParams &p, const U &u, const U &v, MaterialPoint<Dual<N>> &m, DVec<N> &encoded) {
    auto lookup = [&](const Texture &t, int c) {
        Dual<N> uu(u), vv(v);
        if constexpr (std::is_same_v<U, Dual<N>>) {
            uu = u;
            vv = v;
        }
        auto taps = t.taps(uu, vv);
        return t.lookup(taps, c);
    };
    for (int c = 0; c < 3; ++c) {
        m.base_color[c] = lookup(p.base_color(), c);
        m.base_color[c].d[c] += 1.0;
        encoded[c] = lookup(p.normal_map(), c);
        encoded[c].d[5 + c] += 1.0;
    }
    m.roughness = lookup(p.roughness(), 0);
    m.roughness.d[3] += 1.0;
    m.metallic = lookup(p.metallic(), 0);
    m.metallic.d[4] += 1.0;
}

template <int N>
struct LocalTerms {
    DVec<N> nee;     // full next-event term
    DVec<N> weight;  // bounce weight
};

// Vertex terms with the material values as the only variables.
LocalTerms<kMaterialSlots> material_terms(const path::Context &ctx, const path::Vertex &v) {
    constexpr int N = kMaterialSlots;
    const Scene &s = *ctx.scene;
    MaterialPoint<Dual<N>> m;
    DVec<N> enc;
    seeded_material<N>(s.params, v.hit.uv.x, v.hit.uv.y, m, enc);
    DVec<N> ns = perturb_normal(enc, v.hit.tangent, v.hit.bitangent, v.hit.interpolated_normal,
                                v.hit.geometric_normal);
    DVec<N> wo(v.wo);
    LocalTerms<N> t;
    if (v.light.valid && dot(v.hit.shading_normal, v.light.direction) > 0.0) {
        DVec<N> l(v.light.direction);
        DVec<N> f = brdf_eval(ns, wo, l, m, s.specular);
        Dual<N> scale = dot(ns, l) * v.light.falloff;
        for (int c = 0; c < 3; ++c) t.nee[c] = f[c] * scale * v.light.radiance[c];
    }
    if (v.bounced) {
        DVec<N> wi(v.wi);
        DVec<N> f = brdf_eval(ns, wo, wi, m, s.specular);
        Dual<N> scale = dot(ns, wi) / (v.pdf * v.survival);
        t.weight = f * scale;
    }
    return t;
}

// Vertex-0 terms with both the material values and the camera pose as
// variables. The hit stays on the recorded triangle; later vertices are
// treated as fixed.
LocalTerms<kMaterialSlots + kPoseSlots> pose_terms(const path::Context &ctx, const path::Sample &sample) {
    constexpr int N = kMaterialSlots + kPoseSlots;
    using D = Dual<N>;
    const Scene &s = *ctx.scene;
    const path::Vertex &v = sample.vertices[0];
    Vec3 rot = s.params.pose_rotation(), trans = s.params.pose_translation();
    DVec<N> w, t;
    for (int k = 0; k < 3; ++k) {
        w[k] = D::variable(rot[k], kMaterialSlots + k);
        t[k] = D::variable(trans[k], kMaterialSlots + 3 + k);
    }
    Matrix3<D> rt = rotation_from_axis_angle(w).transposed();
    DVec<N> origin = -(rt * t);
    DVec<N> dir = normalize(rt * DVec<N>(ctx.camera_k_inv * Vec3{sample.px, sample.py, 1.0}));
    PlaneHit<D> ph = intersect_triangle_plane(s.mesh, v.hit.triangle, origin, dir);

    const auto &tri = s.mesh.triangles[v.hit.triangle];
    D b0 = D(1.0) - ph.b1 - ph.b2;
    const auto &uv0 = s.mesh.uvs[tri[0]], &uv1 = s.mesh.uvs[tri[1]], &uv2 = s.mesh.uvs[tri[2]];
    D u = b0 * uv0.x + ph.b1 * uv1.x + ph.b2 * uv2.x;
    D vv = b0 * uv0.y + ph.b1 * uv1.y + ph.b2 * uv2.y;
    DVec<N> n_interp = DVec<N>(s.mesh.normals[tri[0]]) * b0 + DVec<N>(s.mesh.normals[tri[1]]) * ph.b1 +
                       DVec<N>(s.mesh.normals[tri[2]]) * ph.b2;
    n_interp = normalize(n_interp);
    if (dot(value_of(n_interp), v.hit.interpolated_normal) < 0.0) n_interp = -n_interp;

    MaterialPoint<D> m;
    DVec<N> enc;
    seeded_material<N>(s.params, u, vv, m, enc);
    // Tangent frame held fixed; only the interpolated normal moves.
    DVec<N> d(enc.x * 2.0 - 1.0, enc.y * 2.0 - 1.0, enc.z * 2.0 - 1.0);
    DVec<N> ns = DVec<N>(v.hit.tangent) * d.x + DVec<N>(v.hit.bitangent) * d.y + n_interp * d.z;
    ns = normalize(ns);
    if (dot(value_of(ns), v.hit.geometric_normal) < 0.0) ns = -ns;
    DVec<N> wo = -dir;

    LocalTerms<N> out;
    if (v.light.valid && dot(v.hit.shading_normal, v.light.direction) > 0.0) {
        DVec<N> to = DVec<N>(ctx.projector_center) - ph.point;
        D dist = length(to);
        DVec<N> l = to / dist;
        DVec<N> q = mat_mul<N>(s.projector.rotation, ph.point) + DVec<N>(s.projector.translation);
        auto pix = project_device(q, s.projector.intrinsics);
        D falloff = q.z / length(q) / (dist * dist);
        auto taps = bilinear_taps(pix.x, pix.y, s.projector.width, s.projector.height);
        DVec<N> f = brdf_eval(ns, wo, l, m, s.specular);
        D scale = dot(ns, l) * falloff;
        for (int c = 0; c < 3; ++c) {
            D le(0.0);
            for (int k = 0; k < 4; ++k) le += taps.weight[k] * ctx.emitted[static_cast<size_t>(taps.texel[k]) * 3 + c];
            out.nee[c] = f[c] * scale * le;
        }
    }
    if (v.bounced) {
        DVec<N> wi(v.wi);
        DVec<N> f = brdf_eval(ns, wo, wi, m, s.specular);
        D scale = dot(ns, wi) / (v.pdf * v.survival);
        out.weight = f * scale;
    }
    return out;
}

void scatter_material(ParamGrads &g, const SceneParams &p, const MaterialTaps &taps,
                      const std::array<double, kMaterialSlots> &d) {
    auto scatter = [&](ParamId id, const BilinearTaps<double> &t, int channels, int channel, double value) {
        auto &buf = g[id];
        if (buf.empty() || value == 0.0) return;
        for (int k = 0; k < 4; ++k) buf[static_cast<size_t>(t.texel[k]) * channels + channel] += t.weight[k] * value;
    };
    for (int c = 0; c < 3; ++c) {
        scatter(ParamId::BaseColor, taps.base, 3, c, d[c]);
        scatter(ParamId::NormalMap, taps.normal, 3, c, d[5 + c]);
    }
    scatter(ParamId::Roughness, taps.rough, 1, 0, d[3]);
    scatter(ParamId::Metallic, taps.metal, 1, 0, d[4]);
    (void)p;
}

template <int N>
std::array<double, N> contract(const LocalTerms<N> &t, const Vec3 &g_nee, const Vec3 &g_weight) {
    std::array<double, N> out{};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < N; ++i) out[i] += g_nee[c] * t.nee[c].d[i] + g_weight[c] * t.weight[c].d[i];
    return out;
}

struct Replay {
    const path::Context &ctx;
    const GradientRequest &req;
    bool materials;
    bool pose;
    bool emitter;  // projector gamma or projector input
    double k;
    Vec3 white_balance;
    double threshold;
    bool clipping;

    void sample(ParamGrads &g, path::Sample &rec, int x, int y, int s, Vec3 a) const {
        Vec3 total = path::trace(ctx, x, y, s, &rec);
        if (!is_finite(total)) return;
        if (clipping) {
            int argmin = 0;
            for (int c = 1; c < 3; ++c)
                if (white_balance[c] < white_balance[argmin]) argmin = c;
            for (int c = 0; c < 3; ++c) {
                if (total[c] <= threshold) continue;
                // The clipped value k / min(w) still depends on w.
                auto &wb = g[ParamId::WhiteBalance];
                if (!wb.empty()) wb[argmin] += a[c] * (-k / (white_balance[argmin] * white_balance[argmin]));
                a[c] = 0.0;
            }
        }
        if (a.x == 0.0 && a.y == 0.0 && a.z == 0.0) return;

        std::array<Vec3, kMaxPathDepth + 1> suffix;
        suffix[rec.count] = Vec3{};
        for (int u = rec.count - 1; u >= 0; --u) {
            const auto &v = rec.vertices[u];
            suffix[u] = v.nee + (v.bounced ? v.weight * suffix[u + 1] : Vec3{});
        }
        const SceneParams &params = ctx.scene->params;
        for (int u = 0; u < rec.count; ++u) {
            const auto &v = rec.vertices[u];
            Vec3 g_nee = a * v.beta;
            Vec3 g_weight = v.bounced ? g_nee * suffix[u + 1] : Vec3{};

            if (emitter && v.light.valid) emitter_grads(g, v, g_nee);

            if (u == 0 && pose) {
                auto terms = pose_terms(ctx, rec);
                auto d = contract(terms, g_nee, g_weight);
                if (materials) {
                    std::array<double, kMaterialSlots> dm{};
                    std::copy_n(d.begin(), kMaterialSlots, dm.begin());
                    scatter_material(g, params, material_taps(params, v.hit.uv), dm);
                }
                for (int i = 0; i < 3; ++i) {
                    if (!g[ParamId::PoseRotation].empty()) g[ParamId::PoseRotation][i] += d[kMaterialSlots + i];
                    if (!g[ParamId::PoseTranslation].empty())
                        g[ParamId::PoseTranslation][i] += d[kMaterialSlots + 3 + i];
                }
            } else if (materials) {
                auto terms = material_terms(ctx, v);
                scatter_material(g, params, material_taps(params, v.hit.uv), contract(terms, g_nee, g_weight));
            }
        }
    }

    void emitter_grads(ParamGrads &g, const path::Vertex &v, const Vec3 &g_nee) const {
        const Scene &s = *ctx.scene;
        auto taps = bilinear_taps(v.light.px, v.light.py, s.projector.width, s.projector.height);
        auto &gamma = g[ParamId::ProjectorGamma];
        for (int c = 0; c < 3; ++c) {
            double coeff = g_nee[c] * v.direct_factor[c];
            if (coeff == 0.0) continue;
            double gam = ctx.projector_gamma[c];
            for (int t = 0; t < 4; ++t) {
                if (taps.weight[t] == 0.0) continue;
                const double in = ctx.input->storage()[static_cast<size_t>(taps.texel[t]) * ctx.input->channels() +
                                                       (ctx.input->channels() >= 3 ? c : 0)];
                if (!gamma.empty()) gamma[c] += coeff * taps.weight[t] * prf_d_gamma(in, gam, k);
                if (!g.projector_input.empty())
                    g.projector_input[static_cast<size_t>(taps.texel[t]) * 3 + c] +=
                        coeff * taps.weight[t] * prf_d_input(in, gam, k);
            }
        }
    }
};

}  // namespace

ParamGrads backward(const RenderRecord &record, const SrgbImage &adjoint, const GradientRequest &request) {
    if (!record.differentiable || record.scene == nullptr) throw MissingRecordError();
    const Scene &scene = *record.scene;
    const RenderSettings &rs = record.settings;
    const int W = scene.camera.width, H = scene.camera.height;
    if (!adjoint.same_shape(W, H) || !record.irradiance.same_shape(W, H))
        throw ValidationError("adjoint", "resolution does not match the recorded render");

    ParamGrads total = ParamGrads::zeros_like(scene, request);
    const Vec3 wb = scene.params.white_balance();
    const Vec3 gamma_c = scene.params.camera_gamma();

    // Camera response, closed form.
    LinearImage adj_e(W, H, 3);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            Vec3 a = adjoint.rgb(x, y);
            CrfGradient cg = crf_gradient(record.irradiance.rgb(x, y), scene.camera.exposure, wb, gamma_c);
            adj_e.set_rgb(x, y, a * cg.d_irradiance);
            for (int c = 0; c < 3; ++c) {
                if (!total[ParamId::WhiteBalance].empty()) total[ParamId::WhiteBalance][c] += a[c] * cg.d_white_balance[c];
                if (!total[ParamId::CameraGamma].empty()) total[ParamId::CameraGamma][c] += a[c] * cg.d_gamma[c];
            }
        }

    const bool materials = request.wants_materials();
    const bool pose = request.wants(ParamId::PoseRotation) || request.wants(ParamId::PoseTranslation);
    const bool emitter = request.wants(ParamId::ProjectorGamma) || request.projector_input;
    const bool clip_w = rs.clipping_enabled && request.wants(ParamId::WhiteBalance);
    if (!(materials || pose || emitter || clip_w)) return total;

    path::Context ctx(scene, record.projector_input, rs);
    Replay replay{ctx,       request, materials, pose, emitter, scene.projector.intensity_scale, wb,
                  radiance_clip_threshold(scene.projector.intensity_scale, wb), rs.clipping_enabled};

    const int T = rs.tile_size;
    const int tiles_x = (W + T - 1) / T, tiles_y = (H + T - 1) / T;
    const int tile_count = tiles_x * tiles_y;
    // Only what the replay writes; camera-response terms are already in `total`.
    GradientRequest lane_request = request;
    lane_request.with(ParamId::CameraGamma, false);
    std::vector<ParamGrads> lanes(kGradientLanes);
    parallel_for(
        kGradientLanes,
        [&](int64_t lane) {
            ParamGrads g = ParamGrads::zeros_like(scene, lane_request);
            auto rec = std::make_unique<path::Sample>();
            for (int tile = static_cast<int>(lane); tile < tile_count; tile += kGradientLanes) {
                int tx = tile % tiles_x, ty = tile / tiles_x;
                for (int y = ty * T; y < std::min(H, (ty + 1) * T); ++y)
                    for (int x = tx * T; x < std::min(W, (tx + 1) * T); ++x) {
                        Vec3 a = adj_e.rgb(x, y) / static_cast<double>(rs.spp);
                        if (a.x == 0.0 && a.y == 0.0 && a.z == 0.0) continue;
                        for (int s = 0; s < rs.spp; ++s) replay.sample(g, *rec, x, y, s, a);
                    }
            }
            lanes[lane] = std::move(g);
        },
        rs.serial);
    for (const auto &g : lanes) total.add(g);
    return total;
}

std::string FdTarget::name() const {
    if (projector_input) return "projector_input[" + std::to_string(index) + "]";
    return std::string(param_name(param)) + "[" + std::to_string(index) + "]";
}

namespace {

double mean_pixel(const SrgbImage &img) {
    double s = 0.0;
    for (double v : img.storage()) s += v;
    return s / static_cast<double>(img.storage().size());
}

}  // namespace

FdReport fd_check(const Scene &scene, const SrgbImage &projector_input, const FdTarget &target, double h,
                  const RenderSettings &settings) {
    RenderSettings rs = settings;
    rs.differentiable = true;
    FdReport report;
    report.name = target.name();

    GradientRequest req = GradientRequest::none();
    if (target.projector_input) req.projector_input = true;
    else req.with(target.param);
    RenderResult base = render(scene, projector_input, rs);
    SrgbImage adj(base.image.width(), base.image.height(), 3,
                  1.0 / static_cast<double>(base.image.storage().size()));
    ParamGrads g = backward(base.record, adj, req);
    report.analytic = target.projector_input ? g.projector_input.at(target.index) : g[target.param].at(target.index);

    rs.differentiable = false;
    auto eval = [&](double delta) {
        if (target.projector_input) {
            SrgbImage in = projector_input;
            in.storage().at(target.index) += delta;
            return mean_pixel(render(scene, in, rs).image);
        }
        auto copy = scene.clone();
        copy->params.block(target.param).value.values().at(target.index) += delta;
        return mean_pixel(render(*copy, projector_input, rs).image);
    };
    report.numeric = (eval(h) - eval(-h)) / (2.0 * h);
    double denom = std::max(std::abs(report.analytic), std::abs(report.numeric));
    report.relative_error = denom > 0.0 ? std::abs(report.analytic - report.numeric) / denom : 0.0;
    return report;
}

}  // namespace procam
