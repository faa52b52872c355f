#pragma once

#include <cstddef>

#include "veinx/image.hpp"

namespace veinx {

struct QualityReport {
    double mse = 0.0;
    double psnr = 0.0;          ///< dB; meaningless when psnr_infinite
    bool psnr_infinite = false;
    double snr = 0.0;           ///< dB of the first image
    bool snr_degenerate = false;
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// Ratios in [0,1]. A zero denominator yields 0 and sets `degenerate`.
struct MetricReport {
    double accuracy = 0.0;
    double tp_over_correct = 0.0;  ///< tp / (tp + tn), an alternative accuracy kept for comparison only
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double dice = 0.0;
    bool degenerate = false;
};

double mse(const GrayImage& a, const GrayImage& b);

struct Decibels {
    double value = 0.0;
    bool infinite = false;
};

/// 10*log10(max_i^2 / mse); identical inputs report `infinite`.
Decibels psnr(const GrayImage& a, const GrayImage& b, double max_i = 1.0);

struct SnrResult {
    double value = 0.0;
    bool degenerate = false;  ///< zero standard deviation
};

/// 10*log10(mean / std) over all pixels.
SnrResult snr(const GrayImage& a);

QualityReport quality(const GrayImage& a, const GrayImage& b, double max_i = 1.0);

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& truth);
MetricReport metrics(const ConfusionCounts& c);

/// Reference figures measured on the SDUMLA-HMT finger-vein images.
/// Kept for side-by-side reporting only; never used as thresholds.
namespace reference {

struct QualityFigures {
    double psnr, mse, snr;
};
inline constexpr QualityFigures kOriginalImages{63.3667, 0.05505, 0.91529};
inline constexpr QualityFigures kPreprocessedImages{66.9896, 0.01978, 0.96670};

struct ClassificationFigures {
    const char* name;
    double accuracy, precision, recall, f1;  ///< percent
};
// The stored F1 of the last row is not the harmonic mean of its
// precision and recall (that would be about 68.8).
inline constexpr ClassificationFigures kClassification[] = {
    {"kmeans", 22.67913, 77.33376, 19.90343, 30.4792},
    {"fcm", 19.97815, 66.36706, 21.02692, 26.7769},
    {"otsu", 76.52724, 91.60966, 46.11347, 61.14073},
    {"optimized", 99.56007, 90.65569, 55.44011, 67.74641},
};

struct TimingFigures {
    const char* name;
    double seconds;
};
inline constexpr TimingFigures kClusteringSeconds[] = {
    {"kmeans", 16.01820},
    {"fcm", 2.83290},
    {"otsu", 0.00156},
    {"optimized", 0.82967},
};

}  // namespace reference

}  // namespace veinx
