#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"
#include "veinx/metrics.hpp"
#include "veinx/preprocess.hpp"
#include "veinx/synth.hpp"

namespace veinx {
namespace {

// Direct window statistics with edge replication, one pixel at a time.
struct Stats {
    double mean, var;
};
Stats window_stats(const GrayImage& img, int r, int c, int window) {
    const int h = window / 2;
    double sum = 0.0, sum_sq = 0.0;
    for (int dr = -h; dr <= h; ++dr) {
        for (int dc = -h; dc <= h; ++dc) {
            const int rr = std::clamp(r + dr, 0, img.height() - 1);
            const int cc = std::clamp(c + dc, 0, img.width() - 1);
            sum += img(rr, cc);
            sum_sq += img(rr, cc) * img(rr, cc);
        }
    }
    const double n = window * window;
    const double mean = sum / n;
    return {mean, sum_sq / n - mean * mean};
}

TEST(LocalStats, MatchesDirectWindows) {
    const GrayImage img = testing::random_image(7, 5, 3);
    const LocalStats stats = local_stats(img, 3);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 7; ++c) {
            const Stats s = window_stats(img, r, c, 3);
            EXPECT_NEAR(stats.mean(r, c), s.mean, 1e-12);
            EXPECT_NEAR(stats.variance(r, c), s.var, 1e-12);
        }
    }
}

TEST(NormalizeLocal, ConstantImageGivesTargetMean) {
    const GrayImage img(9, 9, 0.8);
    for (double target : {0.5, 1.3, -0.2}) {
        const GrayImage out = normalize_local(img, 5, target, 0.01);
        for (double v : out.values()) EXPECT_EQ(v, std::clamp(target, 0.0, 1.0));
    }
}

TEST(NormalizeLocal, FixedPointOnBalancedPattern) {
    // Every interior 3x3 window holds each of three levels three times:
    // mean 0.5, variance (2/3) d^2 = 0.01.
    const double d = std::sqrt(0.015);
    const double levels[3] = {0.5 - d, 0.5, 0.5 + d};
    Grid<double> px(9, 9);
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 9; ++c) px(r, c) = levels[(r + c) % 3];
    const GrayImage img(px);
    const GrayImage out = normalize_local(img, 3, 0.5, 0.01);
    for (int r = 1; r < 8; ++r)
        for (int c = 1; c < 8; ++c) EXPECT_NEAR(out(r, c), img(r, c), 1e-9);
}

TEST(NormalizeLocal, ScalarLoopOracle4x4) {
    const GrayImage img(4, 4, std::vector<double>{0.10, 0.35, 0.80, 0.55, 0.20, 0.95, 0.05, 0.60,
                                                  0.45, 0.30, 0.70, 0.15, 0.90, 0.25, 0.40, 0.65});
    const GrayImage out = normalize_local(img, 3, 0.5, 0.01);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const Stats s = window_stats(img, r, c, 3);
            const double expect = std::clamp(0.5 + (img(r, c) - s.mean) * std::sqrt(0.01 / s.var), 0.0, 1.0);
            EXPECT_NEAR(out(r, c), expect, 1e-12) << r << "," << c;
        }
    }
}

TEST(NormalizeLocal, Preconditions) {
    const GrayImage img(8, 8, 0.5);
    EXPECT_THROW(normalize_local(img, 4, 0.5, 0.01), InvalidArgument);
    EXPECT_THROW(normalize_local(img, 1, 0.5, 0.01), InvalidArgument);
    EXPECT_THROW(normalize_local(img, 9, 0.5, 0.01), InvalidArgument);
    EXPECT_THROW(normalize_local(img, 3, 0.5, 0.0), InvalidArgument);
}

TEST(NormalizeLocal, WindowStatisticsApproachTargets) {
    const GrayImage noise = testing::random_image(64, 64, 11);
    const GrayImage out = normalize_local(noise, 15, 0.5, 0.01);
    const LocalStats stats = local_stats(out, 15);
    double mean = 0.0, var = 0.0;
    int n = 0;
    for (int r = 8; r < 56; ++r) {
        for (int c = 8; c < 56; ++c) {
            mean += stats.mean(r, c);
            var += stats.variance(r, c);
            ++n;
        }
    }
    mean /= n;
    var /= n;
    EXPECT_NEAR(mean, 0.5, 0.5 * 0.2);
    EXPECT_NEAR(var, 0.01, 0.01 * 0.2);
}

TEST(WienerDenoise, ConstantUnchanged) {
    const GrayImage img(6, 6, 0.37);
    EXPECT_EQ(wiener_denoise(img, 3), img);
}

TEST(WienerDenoise, HandBuilt3x3) {
    const GrayImage img(3, 3, std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.9, 0.6, 0.7, 0.8, 0.5});
    // nu^2: mean of the nine replicated-window variances.
    double noise = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) noise += window_stats(img, r, c, 3).var;
    noise /= 9.0;
    // The centre window is the whole image: mean 0.5, variance 0.06666...
    const double mu = 4.5 / 9.0;
    double var = 0.0;
    for (double v : img.values()) var += (v - mu) * (v - mu);
    var /= 9.0;
    const double expect = mu + std::max(var - noise, 0.0) / var * (0.9 - mu);
    EXPECT_NEAR(wiener_denoise(img, 3)(1, 1), expect, 1e-12);
}

TEST(WienerDenoise, ReducesPhantomNoise) {
    PhantomSpec spec;
    spec.noise_sigma = 0.0;
    const GrayImage clean = gen_phantom(spec).image;
    const GrayImage noisy = add_gaussian_noise(clean, 0.05, 99);
    const GrayImage denoised = wiener_denoise(noisy, 3);
    EXPECT_LT(mse(denoised, clean), mse(noisy, clean));
    for (double v : denoised.values()) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
}

TEST(AdjustMidrange, EndpointsAndMidpoint) {
    const GrayImage img(3, 1, std::vector<double>{0.0, 1.0, 0.5});
    const GrayImage out = adjust_midrange(img, AdjustSpec{});
    EXPECT_NEAR(out(0, 0), 0.2, 1e-12);
    EXPECT_NEAR(out(0, 1), 0.6, 1e-12);
    EXPECT_NEAR(out(0, 2), 0.4, 1e-12);
}

TEST(AdjustMidrange, DefaultWindow) {
    const AdjustSpec spec;
    EXPECT_EQ(spec.l_out, 0.2);
    EXPECT_EQ(spec.h_out, 0.6);
    EXPECT_EQ(spec.step, 0.1);
}

TEST(AdjustMidrange, IdentityWhenWindowsMatch) {
    const GrayImage img = testing::random_image(8, 8, 5, 0.3, 0.7);
    AdjustSpec spec{0.3, 0.7, 0.3, 0.7, 0.1};
    const GrayImage out = adjust_midrange(img, spec);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(out.values()[i], img.values()[i], 1e-12);
}

TEST(AdjustMidrange, MonotoneAndBounded) {
    AdjustSpec spec{0.25, 0.75, 0.2, 0.6, 0.1};
    std::vector<double> xs;
    for (int i = 0; i <= 1000; ++i) xs.push_back(i / 1000.0);
    const GrayImage out = adjust_midrange(GrayImage(1001, 1, xs), spec);
    for (int i = 0; i <= 1000; ++i) {
        EXPECT_GE(out(0, i), 0.2);
        EXPECT_LE(out(0, i), 0.6);
        if (i > 0) EXPECT_GE(out(0, i), out(0, i - 1));
    }
}

TEST(AdjustSpec, Validation) {
    EXPECT_THROW((AdjustSpec{0.5, 0.5, 0.2, 0.6, 0.1}.validate()), InvalidArgument);
    EXPECT_THROW((AdjustSpec{0.0, 1.0, 0.6, 0.2, 0.1}.validate()), InvalidArgument);
    EXPECT_THROW((AdjustSpec{0.0, 1.0, 0.2, 0.6, 0.0}.validate()), InvalidArgument);
    EXPECT_THROW((AdjustSpec{0.0, 1.0, 0.2, 0.6, 0.5}.validate()), InvalidArgument);
    EXPECT_THROW((AdjustSpec{0.0, 1.2, 0.2, 0.6, 0.1}.validate()), InvalidArgument);
}

TEST(QuantizeLevels, FiveLevels) {
    const AdjustSpec spec;
    EXPECT_EQ(spec.level_count(), 5);
    const auto levels = spec.levels();
    const double expect[] = {0.2, 0.3, 0.4, 0.5, 0.6};
    ASSERT_EQ(levels.size(), 5u);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(levels[i], expect[i], 1e-12);
    for (int i = 1; i < 5; ++i) EXPECT_LT(levels[i - 1], levels[i]);

    const QuantizedImage q = quantize_levels(testing::random_image(10, 10, 2, 0.2, 0.6), spec);
    EXPECT_EQ(q.k, 5);
    for (double v : q.image.values()) {
        EXPECT_TRUE(std::find(q.levels.begin(), q.levels.end(), v) != q.levels.end()) << v;
    }
}

TEST(QuantizeLevels, ConstantImage) {
    const QuantizedImage q = quantize_levels(GrayImage(4, 4, 0.4), AdjustSpec{});
    for (double v : q.image.values()) EXPECT_NEAR(v, 0.4, 1e-12);
    EXPECT_EQ(q.k, 5);
    EXPECT_EQ(q.levels_present(), 1);
}

TEST(QuantizeLevels, WithinHalfStep) {
    const AdjustSpec spec;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const GrayImage img = testing::random_image(16, 16, seed, 0.2, 0.6);
        const QuantizedImage q = quantize_levels(img, spec);
        for (std::size_t i = 0; i < img.size(); ++i) {
            EXPECT_LE(std::abs(q.image.values()[i] - img.values()[i]), spec.step / 2 + 1e-12);
        }
    }
}

TEST(QuantizeLevels, Idempotent) {
    const AdjustSpec spec;
    const QuantizedImage once = quantize_levels(testing::random_image(16, 16, 4, 0.2, 0.6), spec);
    const QuantizedImage twice = quantize_levels(once.image, spec);
    EXPECT_EQ(once.image, twice.image);
}

TEST(QuantizeLevels, TiesSnapDown) {
    const AdjustSpec spec{0.0, 1.0, 0.0, 1.0, 0.5};
    const QuantizedImage q = quantize_levels(GrayImage(2, 1, std::vector<double>{0.25, 0.75}), spec);
    EXPECT_EQ(q.image(0, 0), 0.0);
    EXPECT_EQ(q.image(0, 1), 0.5);
}

TEST(StretchLimits, PercentilesAndFlatFallback) {
    std::vector<double> xs;
    for (int i = 0; i <= 100; ++i) xs.push_back(i / 100.0);
    const auto [lo, hi] = stretch_limits(GrayImage(101, 1, xs));
    EXPECT_NEAR(lo, 0.01, 1e-12);
    EXPECT_NEAR(hi, 0.99, 1e-12);
    const auto flat = stretch_limits(GrayImage(5, 5, 0.3));
    EXPECT_EQ(flat.first, 0.0);
    EXPECT_EQ(flat.second, 1.0);
    EXPECT_THROW(stretch_limits(GrayImage(3, 3, 0.3), 50.0, 10.0), InvalidArgument);
}

TEST(Preprocess, StagesChainAndFillLevels) {
    const Phantom ph = gen_phantom(PhantomSpec{});
    const PreprocessParams params;
    const PreprocessStages st = preprocess(ph.image, params);
    EXPECT_EQ(st.normalized, normalize_local(ph.image, 15, 0.5, 0.01));
    EXPECT_EQ(st.denoised, wiener_denoise(st.normalized, 3));
    for (double v : st.adjusted.values()) {
        EXPECT_GE(v, 0.2);
        EXPECT_LE(v, 0.6);
    }
    EXPECT_EQ(st.quantized.k, 5);
    EXPECT_EQ(st.quantized.levels_present(), 5);
}

TEST(Preprocess, FixedInputWindowWhenAutoRangeOff) {
    const Phantom ph = gen_phantom(PhantomSpec{});
    PreprocessParams params;
    params.auto_input_range = false;
    const PreprocessStages st = preprocess(ph.image, params);
    EXPECT_EQ(st.adjusted, adjust_midrange(st.denoised, params.adjust));
}

}  // namespace
}  // namespace veinx
