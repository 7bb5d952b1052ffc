// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/brdf.h>
#include <procam/error.h>
#include <procam/geometry.h>
#include <procam/optimize.h>
#include <procam/parallel.h>
#include <procam/rng.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace procam {

void Adam::update(std::vector<double> &x, const std::vector<double> &grad, double lr, AdamMoments &m) const {
    if (m.first.size() != x.size()) {
        m.first.assign(x.size(), 0.0);
        m.second.assign(x.size(), 0.0);
    }
    const double c1 = 1.0 - std::pow(s_.beta1, t_), c2 = 1.0 - std::pow(s_.beta2, t_);
    for (size_t i = 0; i < x.size(); ++i) {
        m.first[i] = s_.beta1 * m.first[i] + (1.0 - s_.beta1) * grad[i];
        m.second[i] = s_.beta2 * m.second[i] + (1.0 - s_.beta2) * grad[i] * grad[i];
        x[i] -= lr * (m.first[i] / c1) / (std::sqrt(m.second[i] / c2) + s_.epsilon);
    }
}

namespace {

// Learning-rate multiplier falling from 1 to `final_fraction` over the run.
double cosine_decay(int it, int iterations, double final_fraction) {
    const double progress = iterations > 1 ? static_cast<double>(it) / (iterations - 1) : 0.0;
    return final_fraction + (1.0 - final_fraction) * 0.5 * (1.0 + std::cos(kPi * progress));
}

// Latents beyond this saturate the logistic to the bound in double
// precision, which would break the open white-balance interval.
constexpr double kLatentLimit = 30.0;

double learning_rate_for(ParamId id, const LearningRates &lr) {
    if (is_texture_param(id)) return lr.textures;
    if (id == ParamId::PoseRotation || id == ParamId::PoseTranslation) return lr.pose;
    return lr.responses;
}

// Mean L1 and its sign adjoint scaled by `weight / N`.
double l1_with_adjoint(const SrgbImage &out, const SrgbImage &target, double weight, SrgbImage &adjoint) {
    const auto &a = out.storage();
    const auto &b = target.storage();
    adjoint = SrgbImage(out.width(), out.height(), out.channels());
    double n = static_cast<double>(a.size()), sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += std::abs(d);
        adjoint.storage()[i] = weight * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
    }
    return sum / n;
}

void dump_gradients(const std::filesystem::path &path, const ParamGrads &g, int iteration, double loss) {
    std::ostringstream msg;
    msg << "iteration " << iteration << ": loss " << loss << "\n";
    for (ParamId id : kAllParams) {
        const auto &v = g[id];
        if (v.empty()) continue;
        double norm = 0.0;
        size_t bad = 0;
        for (double x : v) {
            if (std::isfinite(x)) norm += x * x;
            else ++bad;
        }
        msg << param_name(id) << ": |g| = " << std::sqrt(norm) << ", non-finite entries " << bad << "\n";
    }
    if (!path.empty()) {
        std::ofstream out(path);
        out << msg.str();
    }
    throw NumericalError("non-finite loss or gradient\n" + msg.str());
}

}  // namespace

TrainResult train(Scene &scene, const TrainConfig &cfg) {
    const size_t K = cfg.inputs.size();
    if (K == 0) throw ValidationError("train.pairs", "need at least one image pair");
    if (cfg.targets.size() != K) throw ValidationError("train.pairs", "inputs and targets differ in count");
    for (size_t i = 0; i < K; ++i) {
        if (!cfg.inputs[i].same_shape(scene.projector.width, scene.projector.height))
            throw ValidationError("train.inputs[" + std::to_string(i) + "]", "not at projector resolution");
        if (!cfg.targets[i].same_shape(scene.camera.width, scene.camera.height))
            throw ValidationError("train.targets[" + std::to_string(i) + "]", "not at camera resolution");
    }
    const auto &lr = cfg.learning_rates;
    if (!(lr.textures > 0.0 && lr.responses > 0.0 && lr.pose > 0.0))
        throw ValidationError("train.learning_rates", "must be positive");
    if (cfg.batch_size < 1) throw ValidationError("train.batch_size", "must be positive");
    if (!(cfg.final_lr_fraction > 0.0 && cfg.final_lr_fraction <= 1.0))
        throw ValidationError("train.final_lr_fraction", "must be in (0, 1]");

    Adam adam;
    std::array<AdamMoments, kParamCount> moments;
    std::vector<size_t> order(K);
    TrainResult result;
    const int batch = static_cast<int>(std::min<size_t>(cfg.batch_size, K));
    size_t cursor = K;  // forces a shuffle on the first draw
    uint64_t epoch = 0;

    for (int it = 0; it < cfg.iterations; ++it) {
        ParamGrads grads = ParamGrads::zeros_like(scene, cfg.trainable);
        AuxBuffers aux;
        if (cfg.denoise.enabled) aux = render_aux(scene, cfg.render.serial);
        double loss = 0.0;
        for (int b = 0; b < batch; ++b) {
            if (cursor == K) {
                std::iota(order.begin(), order.end(), size_t{0});
                Rng rng(hash_keys({cfg.seed, 0x7368756666ULL, epoch++}));
                for (size_t i = K - 1; i > 0; --i) std::swap(order[i], order[rng.next_u32() % (i + 1)]);
                cursor = 0;
            }
            size_t pair = order[cursor++];
            RenderSettings rs = cfg.render;
            rs.seed = hash_keys({cfg.seed, static_cast<uint64_t>(it), static_cast<uint64_t>(b)});
            rs.differentiable = true;
            RenderResult res = render(scene, cfg.inputs[pair], rs);
            SrgbImage out = cfg.denoise.enabled ? denoise(res.image, aux, cfg.denoise, rs.serial) : res.image;
            SrgbImage adj;
            loss += l1_with_adjoint(out, cfg.targets[pair], 1.0 / batch, adj) / batch;
            if (cfg.denoise.enabled) adj = denoise_backward(adj, aux, cfg.denoise, rs.serial);
            grads.add(backward(res.record, adj, cfg.trainable));
        }
        if (cfg.lambda_reg > 0.0)
            for (ParamId id : kAllParams)
                if (is_texture_param(id) && cfg.trainable.wants(id))
                    loss += cfg.lambda_reg * tv_loss(scene.params.block(id).value, &grads[id], cfg.lambda_reg);
        if (!std::isfinite(loss) || !grads.all_finite()) dump_gradients(cfg.dump_path, grads, it, loss);
        result.loss_history.push_back(loss);

        adam.begin_step();
        const double lr_scale = cosine_decay(it, cfg.iterations, cfg.final_lr_fraction);
        for (ParamId id : kAllParams) {
            if (!cfg.trainable.wants(id)) continue;
            ParamBlock &blk = scene.params.block(id);
            std::vector<double> g(blk.latent.size());
            for (size_t i = 0; i < g.size(); ++i) g[i] = grads[id][i] * squash_derivative(blk.latent[i], blk.lo, blk.hi);
            adam.update(blk.latent, g, lr_scale * learning_rate_for(id, lr), moments[static_cast<int>(id)]);
            for (double &l : blk.latent) l = std::clamp(l, -kLatentLimit, kLatentLimit);
            blk.update_values();
        }
        scene.params.validate();
        if (cfg.on_iteration) cfg.on_iteration(it, loss);
    }
    return result;
}

SrgbImage relight(const Scene &scene, const SrgbImage &projector_input, const RenderSettings &render_settings,
                  const DenoiseSettings &denoise_settings) {
    RenderSettings rs = render_settings;
    rs.differentiable = false;
    RenderResult res = render(scene, projector_input, rs);
    if (!denoise_settings.enabled) return res.image;
    return denoise(res.image, render_aux(scene, rs.serial), denoise_settings, rs.serial);
}

SrgbImage warp_to_projector(const Scene &scene, const SrgbImage &camera_image, double fallback,
                            std::vector<uint8_t> *visible) {
    const auto &p = scene.projector;
    SrgbImage out(p.width, p.height, 3, fallback);
    if (visible) visible->assign(static_cast<size_t>(p.width) * p.height, 0);
    const Mat3 rt = p.rotation.transposed(), kp_inv = inverse(p.intrinsics);
    const Vec3 center = p.center();
    const Mat3 rc = rotation_from_axis_angle(scene.params.pose_rotation());
    const Vec3 tc = scene.params.pose_translation();
    const Vec3 cam_origin = rc.transposed() * (-tc);
    const double offset = 1e-4 * scene.scene_scale();
    parallel_for(p.height, [&](int64_t yy) {
        int y = static_cast<int>(yy);
        for (int x = 0; x < p.width; ++x) {
            Ray ray{center, normalize(rt * (kp_inv * Vec3{x + 0.5, y + 0.5, 1.0}))};
            auto th = scene.bvh.intersect(ray);
            if (!th) continue;
            Vec3 point = ray.origin + ray.direction * th->t;
            Vec3 q = rc * point + tc;
            if (!(q.z > 0.0)) continue;
            auto pix = project_device(q, scene.camera.intrinsics);
            if (!(pix.x >= 0.0 && pix.x < scene.camera.width && pix.y >= 0.0 && pix.y < scene.camera.height)) continue;
            Vec3 to_cam = cam_origin - point;
            double d = length(to_cam);
            Vec3 dir = to_cam / d;
            if (scene.bvh.occluded(Ray{point + dir * offset, dir, 0.0, d - 2.0 * offset})) continue;
            auto taps = bilinear_taps(pix.x, pix.y, camera_image.width(), camera_image.height());
            Vec3 v;
            for (int t = 0; t < 4; ++t) {
                int tx = taps.texel[t] % camera_image.width(), ty = taps.texel[t] / camera_image.width();
                v += camera_image.rgb(tx, ty) * taps.weight[t];
            }
            out.set_rgb(x, y, v);
            if (visible) (*visible)[static_cast<size_t>(y) * p.width + x] = 1;
        }
    });
    return out;
}

CompensationResult compensate(const Scene &scene, const SrgbImage &target, const CompensateConfig &cfg) {
    if (!target.same_shape(scene.camera.width, scene.camera.height))
        throw ValidationError("compensate.target", "not at camera resolution");
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("compensate.learning_rate", "must be positive");
    if (!(cfg.final_lr_fraction > 0.0 && cfg.final_lr_fraction <= 1.0))
        throw ValidationError("compensate.final_lr_fraction", "must be in (0, 1]");
    const auto &p = scene.projector;
    CompensationResult result;
    SrgbImage input = cfg.warp_init ? warp_to_projector(scene, target, 0.5) : SrgbImage(p.width, p.height, 3, 0.5);
    AuxBuffers aux;
    if (cfg.denoise.enabled) aux = render_aux(scene, cfg.render.serial);
    GradientRequest req = GradientRequest::none();
    req.projector_input = true;
    Adam adam;
    AdamMoments moments;
    SrgbImage best = input;
    double best_loss = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.iterations; ++it) {
        RenderSettings rs = cfg.render;
        rs.seed = hash_keys({cfg.render.seed, 0x636f6d70ULL, static_cast<uint64_t>(it)});
        rs.differentiable = true;
        RenderResult res = render(scene, input, rs);
        SrgbImage out = cfg.denoise.enabled ? denoise(res.image, aux, cfg.denoise, rs.serial) : res.image;
        SrgbImage adj;
        double loss = l1_with_adjoint(out, target, 1.0, adj);
        if (!std::isfinite(loss)) throw NumericalError("compensation loss is not finite");
        result.loss_history.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best = input;
        }
        if (cfg.denoise.enabled) adj = denoise_backward(adj, aux, cfg.denoise, rs.serial);
        ParamGrads g = backward(res.record, adj, req);
        if (!g.all_finite()) throw NumericalError("compensation gradient is not finite");
        adam.begin_step();
        adam.update(input.storage(), g.projector_input,
                    cfg.learning_rate * cosine_decay(it, cfg.iterations, cfg.final_lr_fraction), moments);
        for (double &v : input.storage()) v = std::clamp(v, 0.0, 1.0);
        if (cfg.on_iteration) cfg.on_iteration(it, loss);
    }
    result.projector_input = best;
    result.rendered = relight(scene, best, cfg.render, cfg.denoise);
    return result;
}

}  // namespace procam
