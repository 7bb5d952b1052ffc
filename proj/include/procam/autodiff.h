// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_AUTODIFF_H
#define PROCAM_AUTODIFF_H

#include <procam/render.h>
#include <procam/scene.h>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace procam {

class MissingRecordError : public std::logic_error {
public:
    MissingRecordError() : std::logic_error("backward() needs a forward pass rendered in differentiable mode") {}
};

// Which gradients backward() should produce. Skipping the material maps
// avoids the per-vertex dual-number evaluation entirely.
struct GradientRequest {
    std::array<bool, kParamCount> params{};
    bool projector_input = false;

    static GradientRequest all();   // every scene parameter, no projector input
    static GradientRequest none();
    GradientRequest &with(ParamId id, bool on = true) {
        params[static_cast<int>(id)] = on;
        return *this;
    }
    bool wants(ParamId id) const { return params[static_cast<int>(id)]; }
    bool wants_materials() const;
};

// Gradients with respect to the constrained parameter values (not the
// latents), laid out like SceneParams::block(id).value.values().
struct ParamGrads {
    std::array<std::vector<double>, kParamCount> param;
    std::vector<double> projector_input;  // W_p * H_p * 3 when requested

    std::vector<double> &operator[](ParamId id) { return param[static_cast<int>(id)]; }
    const std::vector<double> &operator[](ParamId id) const { return param[static_cast<int>(id)]; }

    static ParamGrads zeros_like(const Scene &scene, const GradientRequest &request);
    void add(const ParamGrads &other);
    void scale(double s);
    bool all_finite() const;
};

// Accumulates adjoints over the batch elements of one optimizer step.
class GradientTape {
public:
    GradientTape(const Scene &scene, const GradientRequest &request);

    void zero();
    void accumulate(const ParamGrads &grads);
    const ParamGrads &grads() const { return grads_; }
    const GradientRequest &request() const { return request_; }

private:
    GradientRequest request_;
    ParamGrads grads_;
};

// Number of partial gradient buffers. Tiles map to lanes round-robin and
// the lanes are summed in index order, so results do not depend on the
// thread count.
inline constexpr int kGradientLanes = 8;

// Reverse pass of render(): `adjoint` holds d loss / d output pixel (post
// camera response). Paths are replayed with the forward seeds; sampling
// decisions are treated as constants.
ParamGrads backward(const RenderRecord &record, const SrgbImage &adjoint, const GradientRequest &request);

// One scalar for the finite-difference check: either an entry of a
// parameter block or a projector-input channel value.
struct FdTarget {
    bool projector_input = false;
    ParamId param = ParamId::ProjectorGamma;
    size_t index = 0;

    std::string name() const;
};

struct FdReport {
    std::string name;
    double analytic = 0.0;
    double numeric = 0.0;
    double relative_error = 0.0;
};

// Central difference of the mean output pixel value with common random
// numbers, against backward().
FdReport fd_check(const Scene &scene, const SrgbImage &projector_input, const FdTarget &target, double h,
                  const RenderSettings &settings);

}  // namespace procam

#endif  // PROCAM_AUTODIFF_H
