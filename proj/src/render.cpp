// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include "path.h"

#include <procam/error.h>
#include <procam/parallel.h>
#include <procam/radiometry.h>
#include <procam/render.h>

#include <cassert>
#include <cmath>
#include <vector>

namespace procam {

void RenderSettings::validate() const {
    if (spp < 1) throw ValidationError("render.spp", "must be at least 1");
    if (max_depth < 1 || max_depth > kMaxPathDepth)
        throw ValidationError("render.max_depth", "must lie in [1, " + std::to_string(kMaxPathDepth) + "]");
    if (tile_size < 1) throw ValidationError("render.tile_size", "must be positive");
}

double AuxBuffers::depth_range() const {
    double lo = 1e300, hi = -1e300;
    for (size_t i = 0; i < mask.storage().size(); ++i)
        if (mask.storage()[i] > 0.5) {
            lo = std::min(lo, depth.storage()[i]);
            hi = std::max(hi, depth.storage()[i]);
        }
    return hi >= lo ? hi - lo : 0.0;
}

namespace path {

Context::Context(const Scene &s, const SrgbImage &in, const RenderSettings &rs)
    : scene(&s), input(&in), settings(&rs) {
    Mat3 rc = rotation_from_axis_angle(s.params.pose_rotation());
    camera_rotation_t = rc.transposed();
    camera_origin = camera_rotation_t * (-s.params.pose_translation());
    camera_k_inv = inverse(s.camera.intrinsics);
    projector_center = s.projector.center();
    projector_gamma = s.params.projector_gamma();
    double k = s.projector.intensity_scale;
    emitted.resize(in.pixel_count() * 3);
    for (int y = 0; y < in.height(); ++y)
        for (int x = 0; x < in.width(); ++x) {
            Vec3 e = prf_apply(in.rgb(x, y), projector_gamma, k);
            size_t i = (static_cast<size_t>(y) * in.width() + x) * 3;
            for (int c = 0; c < 3; ++c) emitted[i + c] = e[c];
        }
    offset = 1e-4 * s.scene_scale();
}

MaterialPoint<double> material_at(const SceneParams &params, const Vec2 &uv) {
    MaterialPoint<double> m;
    const Texture &bc = params.base_color();
    auto tb = bc.taps(uv.x, uv.y);
    for (int c = 0; c < 3; ++c) m.base_color[c] = bc.lookup(tb, c);
    const Texture &r = params.roughness();
    m.roughness = r.lookup(r.taps(uv.x, uv.y), 0);
    const Texture &mt = params.metallic();
    m.metallic = mt.lookup(mt.taps(uv.x, uv.y), 0);
    return m;
}

namespace {

LightLink connect(const Context &ctx, const SurfaceHit &hit) {
    const Scene &s = *ctx.scene;
    LightLink link;
    Vec3 to = ctx.projector_center - hit.point;
    double d = length(to);
    if (!(d > 0.0)) return link;
    Vec3 l = to / d;
    if (dot(hit.geometric_normal, l) <= 0.0) return link;
    Vec3 q = s.projector.rotation * hit.point + s.projector.translation;
    if (!(q.z > 0.0)) return link;
    auto pix = project_device(q, s.projector.intrinsics);
    if (!(pix.x >= 0.0 && pix.x < s.projector.width && pix.y >= 0.0 && pix.y < s.projector.height)) return link;
    Ray shadow{hit.point + hit.geometric_normal * ctx.offset, l, 0.0, d - 2.0 * ctx.offset};
    if (s.bvh.occluded(shadow)) return link;
    link.valid = true;
    link.direction = l;
    link.distance = d;
    link.falloff = (q.z / length(q)) / (d * d);
    link.px = pix.x;
    link.py = pix.y;
    auto taps = bilinear_taps(pix.x, pix.y, s.projector.width, s.projector.height);
    for (int c = 0; c < 3; ++c) {
        double v = 0.0;
        for (int t = 0; t < 4; ++t) v += taps.weight[t] * ctx.emitted[static_cast<size_t>(taps.texel[t]) * 3 + c];
        link.radiance[c] = v;
    }
    return link;
}

}  // namespace

Vec3 trace(const Context &ctx, int x, int y, int sample, Sample *record) {
    const Scene &s = *ctx.scene;
    const RenderSettings &rs = *ctx.settings;
    Rng rng(sample_key(rs.seed, s.camera.width, x, y, sample));
    double u0 = rng.uniform(), u1 = rng.uniform();
    double jx = 0.5, jy = 0.5;
    if (rs.jitter) {
        int m = static_cast<int>(std::sqrt(static_cast<double>(rs.spp)));
        while ((m + 1) * (m + 1) <= rs.spp) ++m;
        if (sample < m * m) {
            jx = ((sample % m) + u0) / m;
            jy = ((sample / m) + u1) / m;
        } else {
            jx = u0;
            jy = u1;
        }
    }
    double px = x + jx, py = y + jy;
    Ray ray{ctx.camera_origin, normalize(ctx.camera_rotation_t * (ctx.camera_k_inv * Vec3{px, py, 1.0}))};
    if (record) {
        record->primary = ray;
        record->px = px;
        record->py = py;
        record->count = 0;
    }
    Vec3 beta{1.0, 1.0, 1.0};
    Vec3 total;
    for (int depth = 0; depth < rs.max_depth; ++depth) {
        auto th = s.bvh.intersect(ray);
        if (!th) break;
        Vertex v;
        v.hit = make_surface_hit(s.mesh, ray, *th);
        v.wo = -ray.direction;
        v.hit.face_toward(v.wo);
        v.hit.shading_normal = shading_normal(v.hit, s.params.normal_map());
        v.material = material_at(s.params, v.hit.uv);
        v.beta = beta;
        const Vec3 &ns = v.hit.shading_normal;
        v.light = connect(ctx, v.hit);
        if (v.light.valid) {
            double cos_s = dot(ns, v.light.direction);
            if (cos_s > 0.0) {
                Vec3 f = brdf_eval(ns, v.wo, v.light.direction, v.material, s.specular);
                v.direct_factor = f * (cos_s * v.light.falloff);
                v.nee = v.direct_factor * v.light.radiance;
                total += beta * v.nee;
            }
        }
        bool more = false;
        if (depth + 1 < rs.max_depth) {
            std::array<double, 3> u{rng.uniform(), rng.uniform(), rng.uniform()};
            auto bs = brdf_sample(ns, v.wo, v.material, s.specular, u);
            if (bs && dot(v.hit.geometric_normal, bs->wi) > 0.0) {
                v.wi = bs->wi;
                v.pdf = bs->pdf;
                v.weight = bs->value * (dot(ns, bs->wi) / bs->pdf);
                more = true;
                if (rs.russian_roulette && depth >= 2) {
                    double q = rng.uniform();
                    v.survival = std::min(0.95, max_component(beta * v.weight));
                    if (q >= v.survival) more = false;
                    else v.weight = v.weight / v.survival;
                }
                v.bounced = more;
            }
        }
        if (record) record->vertices[record->count++] = v;
        if (!more) break;
        beta = beta * v.weight;
        ray = Ray{v.hit.point + v.hit.geometric_normal * ctx.offset, v.wi};
    }
    return total;
}

}  // namespace path

Ray camera_ray(const Scene &scene, double px, double py) {
    Mat3 rt = rotation_from_axis_angle(scene.params.pose_rotation()).transposed();
    Vec3 origin = rt * (-scene.params.pose_translation());
    return {origin, normalize(rt * (inverse(scene.camera.intrinsics) * Vec3{px, py, 1.0}))};
}

CameraModel scaled_camera(const CameraModel &camera, double factor) {
    CameraModel c = camera;
    c.width = static_cast<int>(std::lround(camera.width * factor));
    c.height = static_cast<int>(std::lround(camera.height * factor));
    for (int r = 0; r < 2; ++r)
        for (int k = 0; k < 3; ++k) c.intrinsics.m[r][k] = camera.intrinsics.m[r][k] * factor;
    return c;
}

RenderResult render(const Scene &scene, const SrgbImage &projector_input, const RenderSettings &settings) {
    settings.validate();
    if (!projector_input.same_shape(scene.projector.width, scene.projector.height))
        throw ValidationError("projector_input", "resolution " + std::to_string(projector_input.width()) + "x" +
                                                     std::to_string(projector_input.height()) +
                                                     " does not match the projector");
    path::Context ctx(scene, projector_input, settings);
    const int W = scene.camera.width, H = scene.camera.height, T = settings.tile_size;
    const int tiles_x = (W + T - 1) / T, tiles_y = (H + T - 1) / T;
    RenderResult out;
    out.irradiance = LinearImage(W, H, 3);
    out.variance_of_mean = LinearImage(W, H, 3);
    const double k = scene.projector.intensity_scale;
    const Vec3 wb = scene.params.white_balance();
    const double threshold = radiance_clip_threshold(k, wb);
    std::vector<uint64_t> dropped(static_cast<size_t>(tiles_x) * tiles_y, 0);
    std::vector<uint64_t> clipped(dropped.size(), 0);

    parallel_for(
        static_cast<int64_t>(dropped.size()),
        [&](int64_t tile) {
            int tx = static_cast<int>(tile % tiles_x), ty = static_cast<int>(tile / tiles_x);
            for (int y = ty * T; y < std::min(H, (ty + 1) * T); ++y)
                for (int x = tx * T; x < std::min(W, (tx + 1) * T); ++x) {
                    Vec3 sum, sum_sq;
                    for (int s = 0; s < settings.spp; ++s) {
                        Vec3 c = path::trace(ctx, x, y, s, nullptr);
                        if (!is_finite(c)) {
                            ++dropped[tile];
                            continue;
                        }
                        if (settings.clipping_enabled) {
                            if (max_component(c) > threshold) ++clipped[tile];
                            c = radiance_clip(c, k, wb);
                            assert(max_component(c) <= threshold);
                        }
                        sum += c;
                        sum_sq += c * c;
                    }
                    double n = settings.spp;
                    Vec3 mean = sum / n;
                    out.irradiance.set_rgb(x, y, mean);
                    if (settings.spp > 1) {
                        Vec3 var = (sum_sq - mean * mean * n) / (n - 1.0);
                        for (int c = 0; c < 3; ++c) var[c] = std::max(var[c], 0.0) / n;
                        out.variance_of_mean.set_rgb(x, y, var);
                    }
                }
        },
        settings.serial);

    for (size_t i = 0; i < dropped.size(); ++i) {
        out.dropped_samples += dropped[i];
        out.clipped_samples += clipped[i];
    }
    out.image = SrgbImage(W, H, 3);
    const Vec3 gamma_c = scene.params.camera_gamma();
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            out.image.set_rgb(x, y, crf_apply(out.irradiance.rgb(x, y), scene.camera.exposure, wb, gamma_c));
    if (settings.differentiable) {
        out.record.differentiable = true;
        out.record.scene = &scene;
        out.record.projector_input = projector_input;
        out.record.settings = settings;
        out.record.irradiance = out.irradiance;
    }
    return out;
}

AuxBuffers render_aux(const Scene &scene, bool serial) {
    const int W = scene.camera.width, H = scene.camera.height;
    AuxBuffers aux{LinearImage(W, H, 3), LinearImage(W, H, 3), LinearImage(W, H, 1), LinearImage(W, H, 1)};
    Mat3 rt = rotation_from_axis_angle(scene.params.pose_rotation()).transposed();
    Vec3 origin = rt * (-scene.params.pose_translation());
    Mat3 k_inv = inverse(scene.camera.intrinsics);
    parallel_for(
        H,
        [&](int64_t yy) {
            int y = static_cast<int>(yy);
            for (int x = 0; x < W; ++x) {
                Ray ray{origin, normalize(rt * (k_inv * Vec3{x + 0.5, y + 0.5, 1.0}))};
                auto th = scene.bvh.intersect(ray);
                if (!th) continue;
                SurfaceHit hit = make_surface_hit(scene.mesh, ray, *th);
                hit.face_toward(-ray.direction);
                hit.shading_normal = shading_normal(hit, scene.params.normal_map());
                auto m = path::material_at(scene.params, hit.uv);
                aux.albedo.set_rgb(x, y, m.base_color);
                aux.normal.set_rgb(x, y, hit.shading_normal);
                aux.depth.at(x, y) = hit.t;
                aux.mask.at(x, y) = 1.0;
            }
        },
        serial);
    return aux;
}

}  // namespace procam
