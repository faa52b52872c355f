#include "veinx/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace veinx {

namespace {

void check_window(const GrayImage& img, int window) {
    if (window < 3 || window % 2 == 0) {
        throw InvalidArgument("window must be odd and >= 3, got " + std::to_string(window));
    }
    if (window > img.width() || window > img.height()) {
        throw InvalidArgument("window " + std::to_string(window) + " larger than image");
    }
}

// Separable box sum with replicated borders.
Grid<double> box_sum(const Grid<double>& src, int radius) {
    const int rows = src.rows();
    const int cols = src.cols();
    Grid<double> horizontal(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int d = -radius; d <= radius; ++d) {
                acc += src.clamped(r, c + d);
            }
            horizontal(r, c) = acc;
        }
    }
    Grid<double> out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int d = -radius; d <= radius; ++d) {
                acc += horizontal.clamped(r + d, c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

}  // namespace

void AdjustSpec::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(l_in) || !in_unit(h_in) || !in_unit(l_out) || !in_unit(h_out)) {
        throw InvalidArgument("adjust bounds must lie in [0,1]");
    }
    if (!(l_in < h_in) || !(l_out < h_out)) {
        throw InvalidArgument("adjust bounds must satisfy low < high");
    }
    if (!(step > 0.0) || step > h_out - l_out + 1e-12) {
        throw InvalidArgument("quantization step must be in (0, h_out - l_out]");
    }
}

int AdjustSpec::level_count() const {
    return static_cast<int>(std::lround((h_out - l_out) / step)) + 1;
}

std::vector<double> AdjustSpec::levels() const {
    const int k = level_count();
    std::vector<double> out(k);
    for (int i = 0; i < k; ++i) {
        out[i] = std::min(h_out, l_out + i * step);
    }
    out.back() = h_out;
    return out;
}

int QuantizedImage::levels_present() const {
    std::set<double> seen(image.values().begin(), image.values().end());
    return static_cast<int>(seen.size());
}

LocalStats local_stats(const GrayImage& img, int window) {
    check_window(img, window);
    const int radius = window / 2;
    const double n = static_cast<double>(window) * window;

    Grid<double> squares = img.grid();
    for (double& v : squares.values()) {
        v *= v;
    }
    Grid<double> sum = box_sum(img.grid(), radius);
    Grid<double> sum_sq = box_sum(squares, radius);

    LocalStats stats{Grid<double>(img.height(), img.width()), Grid<double>(img.height(), img.width())};
    for (std::size_t i = 0; i < img.size(); ++i) {
        double mean = sum.values()[i] / n;
        double var = sum_sq.values()[i] / n - mean * mean;
        stats.mean.values()[i] = mean;
        stats.variance.values()[i] = var < kFlatVariance ? 0.0 : var;
    }
    return stats;
}

GrayImage normalize_local(const GrayImage& img, int window, double target_mean, double target_var) {
    if (!(target_var > 0.0)) {
        throw InvalidArgument("target variance must be positive");
    }
    const LocalStats stats = local_stats(img, window);
    Grid<double> out(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double var = stats.variance.values()[i];
        if (var == 0.0) {
            out.values()[i] = target_mean;
        } else {
            const double dev = img.values()[i] - stats.mean.values()[i];
            out.values()[i] = target_mean + dev * std::sqrt(target_var / var);
        }
    }
    return GrayImage::from_clamped(std::move(out));
}

GrayImage wiener_denoise(const GrayImage& img, int window) {
    constexpr double kEps = 1e-12;
    const LocalStats stats = local_stats(img, window);

    double noise = 0.0;
    for (double v : stats.variance.values()) {
        noise += v;
    }
    noise /= static_cast<double>(img.size());

    Grid<double> out(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double mean = stats.mean.values()[i];
        const double var = stats.variance.values()[i];
        if (var == 0.0) {
            out.values()[i] = img.values()[i];  // flat window: the pixel is its own mean, exactly
            continue;
        }
        const double gain = std::max(var - noise, 0.0) / std::max(var, kEps);
        out.values()[i] = mean + gain * (img.values()[i] - mean);
    }
    return GrayImage::from_clamped(std::move(out));
}

GrayImage adjust_midrange(const GrayImage& img, const AdjustSpec& spec) {
    spec.validate();
    const double scale = (spec.h_out - spec.l_out) / (spec.h_in - spec.l_in);
    Grid<double> out(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double x = std::clamp(img.values()[i], spec.l_in, spec.h_in);
        out.values()[i] = std::clamp(spec.l_out + scale * (x - spec.l_in), spec.l_out, spec.h_out);
    }
    return GrayImage(std::move(out));
}

QuantizedImage quantize_levels(const GrayImage& img, const AdjustSpec& spec) {
    spec.validate();
    std::vector<double> levels = spec.levels();
    Grid<double> out(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double x = img.values()[i];
        auto hi = std::lower_bound(levels.begin(), levels.end(), x);
        if (hi == levels.begin()) {
            out.values()[i] = levels.front();
        } else if (hi == levels.end()) {
            out.values()[i] = levels.back();
        } else {
            const double upper = *hi;
            const double lower = *(hi - 1);
            // Exactly halfway snaps to the lower level.
            out.values()[i] = (x - lower <= upper - x) ? lower : upper;
        }
    }
    const int k = static_cast<int>(levels.size());
    return QuantizedImage{GrayImage(std::move(out)), std::move(levels), k};
}

std::pair<double, double> stretch_limits(const GrayImage& img, double low_pct, double high_pct) {
    if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 100.0)) {
        throw InvalidArgument("stretch percentiles must satisfy 0 <= low < high <= 100");
    }
    std::vector<double> sorted(img.values().begin(), img.values().end());
    std::sort(sorted.begin(), sorted.end());
    auto at = [&](double pct) {
        const auto idx = static_cast<std::size_t>(std::floor(pct / 100.0 * static_cast<double>(sorted.size() - 1)));
        return sorted[idx];
    };
    const double lo = at(low_pct);
    const double hi = at(high_pct);
    if (!(hi - lo > 1e-6)) {
        return {0.0, 1.0};
    }
    return {lo, hi};
}

PreprocessStages preprocess(const GrayImage& img, const PreprocessParams& params) {
    GrayImage normalized = normalize_local(img, params.normalize_window, params.target_mean, params.target_var);
    GrayImage denoised = wiener_denoise(normalized, params.wiener_window);
    AdjustSpec spec = params.adjust;
    if (params.auto_input_range) {
        std::tie(spec.l_in, spec.h_in) = stretch_limits(denoised);
    }
    GrayImage adjusted = adjust_midrange(denoised, spec);
    QuantizedImage quantized = quantize_levels(adjusted, spec);
    return {std::move(normalized), std::move(denoised), std::move(adjusted), std::move(quantized)};
}

}  // namespace veinx
