#include "veinx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>

namespace veinx {

GrayImage gen_grating(double angle, double period, int width, int height, double phase) {
    if (!(period >= 2.0)) {
        throw InvalidArgument("grating period must be >= 2");
    }
    const double beta = angle + std::numbers::pi / 2.0;
    const double cb = std::cos(beta), sb = std::sin(beta);
    Grid<double> px(height, width);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            px(i, j) = 0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * (j * cb + i * sb) / period + phase);
        }
    }
    return GrayImage::from_clamped(std::move(px));
}

void PhantomSpec::validate() const {
    if (width < 8 || height < 8) throw InvalidArgument("phantom must be at least 8x8");
    if (vein_count < 0) throw InvalidArgument("vein_count must be >= 0");
    if (!(vein_width_min > 0.0) || vein_width_max < vein_width_min) {
        throw InvalidArgument("vein width range must be positive and ordered");
    }
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(background_level) || !unit(vein_depth)) {
        throw InvalidArgument("background_level and vein_depth must lie in [0,1]");
    }
    if (noise_sigma < 0.0 || blur_sigma < 0.0) throw InvalidArgument("noise and blur sigma must be >= 0");
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (sigma <= 0.0) {
        return img;
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        taps[t + radius] = std::exp(-t * t / (2.0 * sigma * sigma));
        sum += taps[t + radius];
    }
    for (double& t : taps) t /= sum;
    const Grid<double>& src = img.grid();
    Grid<double> tmp(src.rows(), src.cols()), out(src.rows(), src.cols());
    for (int r = 0; r < src.rows(); ++r) {
        for (int c = 0; c < src.cols(); ++c) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) acc += taps[t + radius] * src.clamped(r, c + t);
            tmp(r, c) = acc;
        }
    }
    for (int r = 0; r < src.rows(); ++r) {
        for (int c = 0; c < src.cols(); ++c) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) acc += taps[t + radius] * tmp.clamped(r + t, c);
            out(r, c) = acc;
        }
    }
    return GrayImage::from_clamped(std::move(out));
}

GrayImage add_gaussian_noise(const GrayImage& img, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Grid<double> out = img.grid();
    for (double& v : out.values()) {
        v += noise(rng);
    }
    return GrayImage::from_clamped(std::move(out));
}

namespace {

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

}  // namespace

Phantom gen_phantom(const PhantomSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double w = spec.width, h = spec.height;

    Phantom out;
    Grid<double> darkening(spec.height, spec.width, 0.0);
    Grid<std::uint8_t> truth(spec.height, spec.width, 0);
    // Each vein enters and leaves through its own horizontal band; shuffling
    // the exit bands makes veins cross without running on top of each other.
    std::vector<int> entry(spec.vein_count), exit(spec.vein_count);
    for (int v = 0; v < spec.vein_count; ++v) entry[v] = exit[v] = v;
    std::shuffle(exit.begin(), exit.end(), rng);
    const double band = spec.vein_count > 0 ? 0.7 / spec.vein_count : 0.0;
    for (int v = 0; v < spec.vein_count; ++v) {
        VeinCurve curve{};
        curve.x0 = 0.0;
        curve.x2 = w - 1.0;
        curve.x1 = w * (0.3 + 0.4 * unit(rng));
        curve.y0 = h * (0.15 + band * (entry[v] + 0.2 + 0.6 * unit(rng)));
        curve.y2 = h * (0.15 + band * (exit[v] + 0.2 + 0.6 * unit(rng)));
        curve.y1 = std::clamp(0.5 * (curve.y0 + curve.y2) + h * (unit(rng) - 0.5) * 0.6, 0.0, h - 1.0);
        curve.width = spec.vein_width_min + (spec.vein_width_max - spec.vein_width_min) * unit(rng);

        const int samples = static_cast<int>(std::ceil(4.0 * (w + h)));
        std::vector<std::pair<double, double>> poly(samples + 1);
        curve.length = 0.0;
        for (int s = 0; s <= samples; ++s) {
            const double t = static_cast<double>(s) / samples;
            const double a = (1 - t) * (1 - t), b = 2 * (1 - t) * t, c = t * t;
            poly[s] = {a * curve.x0 + b * curve.x1 + c * curve.x2, a * curve.y0 + b * curve.y1 + c * curve.y2};
            if (s > 0) {
                curve.length += std::hypot(poly[s].first - poly[s - 1].first, poly[s].second - poly[s - 1].second);
            }
        }

        // Shadow standard deviation is half the vein width, so the truth band
        // (half a width either side of the centreline) spans +/- one sigma.
        const double profile_sigma = 0.5 * curve.width;
        const double half = 0.5 * curve.width;
        const int reach = static_cast<int>(std::ceil(4.0 * profile_sigma)) + 1;
        Grid<double> dist(spec.height, spec.width, std::numeric_limits<double>::infinity());
        for (int s = 1; s <= samples; ++s) {
            const auto [ax, ay] = poly[s - 1];
            const auto [bx, by] = poly[s];
            const int r0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by))) - reach);
            const int r1 = std::min(spec.height - 1, static_cast<int>(std::ceil(std::max(ay, by))) + reach);
            const int c0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx))) - reach);
            const int c1 = std::min(spec.width - 1, static_cast<int>(std::ceil(std::max(ax, bx))) + reach);
            for (int r = r0; r <= r1; ++r) {
                for (int c = c0; c <= c1; ++c) {
                    dist(r, c) = std::min(dist(r, c), segment_distance(c, r, ax, ay, bx, by));
                }
            }
        }
        for (int r = 0; r < spec.height; ++r) {
            for (int c = 0; c < spec.width; ++c) {
                const double d = dist(r, c);
                if (!std::isfinite(d)) continue;
                const double dark = spec.vein_depth * std::exp(-d * d / (2.0 * profile_sigma * profile_sigma));
                darkening(r, c) = std::max(darkening(r, c), dark);
                if (d <= half) truth(r, c) = 1;
            }
        }
        out.veins.push_back(curve);
    }

    Grid<double> clean(spec.height, spec.width);
    for (std::size_t i = 0; i < clean.size(); ++i) {
        clean.values()[i] = spec.background_level - darkening.values()[i];
    }
    GrayImage image = gaussian_blur(GrayImage::from_clamped(std::move(clean)), spec.blur_sigma);
    if (spec.noise_sigma > 0.0) {
        image = add_gaussian_noise(image, spec.noise_sigma, rng());
    }
    // Sensor-like 8-bit quantization.
    Grid<double> quantized = image.grid();
    for (double& v : quantized.values()) {
        v = to_byte(v) / 255.0;
    }
    out.image = GrayImage(std::move(quantized));
    out.truth = BinaryMask(std::move(truth));
    return out;
}

}  // namespace veinx
