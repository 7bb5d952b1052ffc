// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PROCAM_IMAGE_H
#define PROCAM_IMAGE_H

#include <procam/math.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace procam {

struct LinearSpace {};
struct DisplaySpace {};

// Row-major, interleaved-channel image. The tag separates linear
// radiometric images (pre camera response) from LDR images in [0,1]
// (post response); converting between them is always explicit.
template <typename Space>
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, double fill = 0.0)
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<size_t>(width) * height * channels, fill) {
        if (width < 0 || height < 0 || channels <= 0) throw std::invalid_argument("bad image shape");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    size_t pixel_count() const { return static_cast<size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }
    bool same_shape(int w, int h) const { return w == width_ && h == height_; }
    template <typename Other>
    bool same_shape(const Image<Other> &o) const {
        return o.width() == width_ && o.height() == height_ && o.channels() == channels_;
    }

    double &at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
    size_t index(int x, int y, int c = 0) const {
        return (static_cast<size_t>(y) * width_ + x) * channels_ + c;
    }

    Vec3 rgb(int x, int y) const {
        size_t i = index(x, y);
        if (channels_ >= 3) return {data_[i], data_[i + 1], data_[i + 2]};
        return {data_[i], data_[i], data_[i]};
    }
    void set_rgb(int x, int y, const Vec3 &v) {
        size_t i = index(x, y);
        for (int c = 0; c < channels_ && c < 3; ++c) data_[i + c] = v[c];
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::vector<double> &storage() { return data_; }
    const std::vector<double> &storage() const { return data_; }

    template <typename Other>
    Image<Other> reinterpret() const {
        Image<Other> r(width_, height_, channels_);
        std::copy(data_.begin(), data_.end(), r.storage().begin());
        return r;
    }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

using LinearImage = Image<LinearSpace>;
using SrgbImage = Image<DisplaySpace>;

// Four bilinear taps over a W x H grid in continuous pixel coordinates
// (texel centers at i + 0.5, clamp-to-edge addressing).
template <typename T>
struct BilinearTaps {
    std::array<int, 4> texel{};  // linear index y * W + x
    std::array<T, 4> weight{};
};

template <typename T>
BilinearTaps<T> bilinear_taps(const T &px, const T &py, int width, int height) {
    using std::floor;
    double sx = value_of(px) - 0.5, sy = value_of(py) - 0.5;
    double x0f = std::floor(sx), y0f = std::floor(sy);
    T fx = px - 0.5 - x0f;
    T fy = py - 0.5 - y0f;
    int x0 = static_cast<int>(x0f), y0 = static_cast<int>(y0f);
    auto cx = [width](int x) { return std::clamp(x, 0, width - 1); };
    auto cy = [height](int y) { return std::clamp(y, 0, height - 1); };
    BilinearTaps<T> t;
    t.texel = {cy(y0) * width + cx(x0), cy(y0) * width + cx(x0 + 1), cy(y0 + 1) * width + cx(x0),
               cy(y0 + 1) * width + cx(x0 + 1)};
    T one(1.0);
    t.weight = {(one - fx) * (one - fy), fx * (one - fy), (one - fx) * fy, fx * fy};
    return t;
}

// UV-addressed texture holding one to three channels per texel.
class Texture {
public:
    Texture() = default;
    Texture(int width, int height, int channels, double fill = 0.0)
        : width_(width), height_(height), channels_(channels),
          values_(static_cast<size_t>(width) * height * channels, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    size_t texel_count() const { return static_cast<size_t>(width_) * height_; }
    std::vector<double> &values() { return values_; }
    const std::vector<double> &values() const { return values_; }
    double &at(int x, int y, int c) { return values_[(static_cast<size_t>(y) * width_ + x) * channels_ + c]; }
    double at(int x, int y, int c) const {
        return values_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }

    template <typename T>
    BilinearTaps<T> taps(const T &u, const T &v) const {
        return bilinear_taps(u * double(width_), v * double(height_), width_, height_);
    }

    template <typename T>
    T lookup(const BilinearTaps<T> &t, int c) const {
        T r(0.0);
        for (int i = 0; i < 4; ++i) r += t.weight[i] * values_[static_cast<size_t>(t.texel[i]) * channels_ + c];
        return r;
    }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> values_;
};

}  // namespace procam

#endif  // PROCAM_IMAGE_H
