// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/error.h>
#include <procam/metrics.h>

#include <array>
#include <cmath>
#include <fstream>

namespace procam {

namespace {

void check_same(const SrgbImage &a, const SrgbImage &b) {
    if (!a.same_shape(b)) throw ValidationError("metrics", "images differ in resolution or channel count");
}

constexpr int kWindow = 11;
constexpr int kHalf = kWindow / 2;

std::array<double, kWindow> gaussian_window() {
    std::array<double, kWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        double d = i - kHalf;
        w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        sum += w[i];
    }
    for (double &v : w) v /= sum;
    return w;
}

}  // namespace

double psnr(const SrgbImage &a, const SrgbImage &b) {
    check_same(a, b);
    double mse = 0.0;
    for (size_t i = 0; i < a.storage().size(); ++i) {
        double d = a.storage()[i] - b.storage()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.storage().size());
    if (mse == 0.0) return kPsnrIdentical;
    return -10.0 * std::log10(mse);
}

double ssim(const SrgbImage &a, const SrgbImage &b) {
    check_same(a, b);
    const int W = a.width(), H = a.height(), C = a.channels();
    if (W < kWindow || H < kWindow) throw ValidationError("metrics", "image smaller than the 11x11 SSIM window");
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const auto g = gaussian_window();
    double total = 0.0;
    size_t count = 0;
    for (int c = 0; c < C; ++c)
        for (int y = kHalf; y < H - kHalf; ++y)
            for (int x = kHalf; x < W - kHalf; ++x) {
                double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                for (int j = -kHalf; j <= kHalf; ++j)
                    for (int i = -kHalf; i <= kHalf; ++i) {
                        double w = g[j + kHalf] * g[i + kHalf];
                        double va = a.at(x + i, y + j, c), vb = b.at(x + i, y + j, c);
                        ma += w * va;
                        mb += w * vb;
                        saa += w * va * va;
                        sbb += w * vb * vb;
                        sab += w * va * vb;
                    }
                double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
                total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                ++count;
            }
    return total / static_cast<double>(count);
}

double mean_l1(const SrgbImage &a, const SrgbImage &b) {
    check_same(a, b);
    double s = 0.0;
    for (size_t i = 0; i < a.storage().size(); ++i) s += std::abs(a.storage()[i] - b.storage()[i]);
    return s / static_cast<double>(a.storage().size());
}

double rgb_distance(const SrgbImage &a, const SrgbImage &b) {
    check_same(a, b);
    double s = 0.0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) s += length(a.rgb(x, y) - b.rgb(x, y));
    return 100.0 * s / static_cast<double>(a.pixel_count());
}

MetricsRow compare_images(const SrgbImage &a, const SrgbImage &b, std::string name) {
    return {std::move(name), psnr(a, b), ssim(a, b), mean_l1(a, b), rgb_distance(a, b)};
}

MetricsRow MetricsReport::mean() const {
    MetricsRow m{"mean"};
    if (rows.empty()) return m;
    for (const auto &r : rows) {
        m.psnr += r.psnr;
        m.ssim += r.ssim;
        m.l1 += r.l1;
        m.rgb_distance += r.rgb_distance;
    }
    double n = static_cast<double>(rows.size());
    m.psnr /= n;
    m.ssim /= n;
    m.l1 /= n;
    m.rgb_distance /= n;
    return m;
}

void MetricsReport::write_csv(const std::filesystem::path &path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(10);
    out << "name,psnr_db,ssim,mean_l1,rgb_distance_x100\n";
    auto row = [&](const MetricsRow &r) {
        out << r.name << "," << (std::isinf(r.psnr) ? std::string("inf") : std::to_string(r.psnr)) << "," << r.ssim
            << "," << r.l1 << "," << r.rgb_distance << "\n";
    };
    for (const auto &r : rows) row(r);
    if (!rows.empty()) row(mean());
}

}  // namespace procam
