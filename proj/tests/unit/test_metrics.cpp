// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/error.h>
#include <procam/metrics.h>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>

using namespace procam;

namespace {

SrgbImage make(int w, int h, const std::function<double(int, int, int)> &f) {
    SrgbImage img(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = f(x, y, c);
    return img;
}

}  // namespace

TEST(Metrics, IdenticalImages) {
    SrgbImage a = make(16, 16, [](int x, int y, int c) { return (x * 3 + y * 5 + c) % 7 / 7.0; });
    MetricsRow r = compare_images(a, a);
    EXPECT_EQ(r.psnr, kPsnrIdentical);
    EXPECT_DOUBLE_EQ(r.ssim, 1.0);
    EXPECT_EQ(r.l1, 0.0);
    EXPECT_EQ(r.rgb_distance, 0.0);
}

TEST(Metrics, ZeroVersusOne) {
    SrgbImage a(12, 12, 3, 0.0), b(12, 12, 3, 1.0);
    EXPECT_DOUBLE_EQ(psnr(a, b), 0.0);
    EXPECT_DOUBLE_EQ(mean_l1(a, b), 1.0);
    EXPECT_NEAR(rgb_distance(a, b), 100.0 * std::sqrt(3.0), 1e-12);
}

TEST(Metrics, PsnrOfKnownMse) {
    SrgbImage a(4, 4, 3, 0.5), b(4, 4, 3, 0.6);
    EXPECT_NEAR(psnr(a, b), 20.0, 1e-9);  // mse 0.01
}

// Reference values from scikit-image's structural_similarity with
// gaussian_weights=True, sigma=1.5, use_sample_covariance=False,
// data_range=1 on the same closed-form images.
TEST(Metrics, SsimMatchesReferenceImplementation) {
    const int W = 32, H = 24;
    SrgbImage chk = make(W, H, [](int x, int y, int) { return ((x / 4 + y / 4) % 2 == 0) ? 0.2 : 0.8; });
    SrgbImage inv = make(W, H, [&](int x, int y, int c) { return 1.0 - chk.at(x, y, c); });
    EXPECT_NEAR(ssim(chk, inv), -0.952987503656, 1e-9);

    auto grad = [&](int x, int y, int c) { return (x + 2.0 * y + 5.0 * c) / (W + 2.0 * H + 10.0); };
    SrgbImage g = make(W, H, grad);
    SrgbImage g2 = make(W, H, [&](int x, int y, int c) { return grad(x, y, c) * grad(x, y, c); });
    EXPECT_NEAR(ssim(g, g2), 0.748874896183, 1e-9);

    auto sine = [](int x, int y, int c) { return 0.5 + 0.4 * std::sin(0.3 * x + c) * std::cos(0.2 * y); };
    SrgbImage s = make(W, H, sine);
    SrgbImage s2 = make(W, H, [&](int x, int y, int c) { return std::clamp(sine(x, y, c) + 0.1, 0.0, 1.0); });
    EXPECT_NEAR(ssim(s, s2), 0.975713362496, 1e-9);
}

TEST(Metrics, SsimStaysInRange) {
    for (int k = 0; k < 5; ++k) {
        SrgbImage a = make(20, 20, [&](int x, int y, int c) { return ((x * 7 + y * 13 + c * k) % 11) / 10.0; });
        SrgbImage b = make(20, 20, [&](int x, int y, int c) { return ((x * 5 + y * 3 + c + k) % 9) / 8.0; });
        double v = ssim(a, b);
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Metrics, ResolutionMismatchIsRejected) {
    SrgbImage a(12, 12, 3), b(12, 13, 3);
    EXPECT_THROW(psnr(a, b), ValidationError);
    EXPECT_THROW(ssim(a, b), ValidationError);
}

TEST(Metrics, ReportMeanAndCsv) {
    MetricsReport rep;
    rep.rows.push_back({"a", 30.0, 0.9, 0.1, 2.0});
    rep.rows.push_back({"b", 40.0, 0.7, 0.3, 4.0});
    MetricsRow m = rep.mean();
    EXPECT_DOUBLE_EQ(m.psnr, 35.0);
    EXPECT_DOUBLE_EQ(m.ssim, 0.8);
    auto path = std::filesystem::temp_directory_path() / "procam_metrics.csv";
    rep.write_csv(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_NE(header.find("psnr"), std::string::npos);
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    EXPECT_GE(lines, 2);
}
