#pragma once

#include <utility>
#include <vector>

#include "veinx/image.hpp"

namespace veinx {

/// Input/output intensity windows of the mid-range stretch plus the
/// quantization step. The output window [0.2, 0.6] with step 0.1 gives
/// five levels, which seeds the cluster count.
struct AdjustSpec {
    double l_in = 0.0;
    double h_in = 1.0;
    double l_out = 0.2;
    double h_out = 0.6;
    double step = 0.1;

    void validate() const;
    int level_count() const;
    std::vector<double> levels() const;
};

struct QuantizedImage {
    GrayImage image;
    std::vector<double> levels;
    int k = 0;

    /// Number of grid levels that actually occur in the image.
    int levels_present() const;
};

/// Per-pixel mean and variance over a square window, border replicated.
struct LocalStats {
    Grid<double> mean;
    Grid<double> variance;
};

/// Variances below this are treated as exactly zero (flat window).
inline constexpr double kFlatVariance = 1e-12;

LocalStats local_stats(const GrayImage& img, int window);

GrayImage normalize_local(const GrayImage& img, int window, double target_mean, double target_var);
GrayImage wiener_denoise(const GrayImage& img, int window);
GrayImage adjust_midrange(const GrayImage& img, const AdjustSpec& spec);
QuantizedImage quantize_levels(const GrayImage& img, const AdjustSpec& spec);

/// Input bounds for the stretch taken from the image itself: the given
/// low/high percentiles of its intensities. Falls back to [0,1] when the
/// image is (nearly) constant.
std::pair<double, double> stretch_limits(const GrayImage& img, double low_pct = 1.0, double high_pct = 99.0);

struct PreprocessParams {
    int normalize_window = 15;
    double target_mean = 0.5;
    double target_var = 0.01;
    int wiener_window = 3;
    AdjustSpec adjust;
    /// When set, adjust.l_in/h_in are replaced by stretch_limits() of the denoised image.
    bool auto_input_range = true;
};

/// Every intermediate of the stage-one preparation, in pipeline order.
struct PreprocessStages {
    GrayImage normalized;
    GrayImage denoised;
    GrayImage adjusted;
    QuantizedImage quantized;
};

PreprocessStages preprocess(const GrayImage& img, const PreprocessParams& params);

}  // namespace veinx
