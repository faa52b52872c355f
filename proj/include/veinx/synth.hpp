#pragma once

#include <cstdint>
#include <vector>

#include "veinx/image.hpp"

namespace veinx {

/// Sinusoidal grating whose stripes run along `angle` (radians, same
/// convention as OrientationField): 0.5 + 0.4*sin(2*pi*(x cos b + y sin b)/period + phase)
/// with b = angle + pi/2.
GrayImage gen_grating(double angle, double period, int width, int height, double phase = 0.0);

struct PhantomSpec {
    std::uint64_t seed = 1;
    int width = 320;
    int height = 240;
    int vein_count = 4;
    double vein_width_min = 2.0;  ///< px; the truth band is +/- width/2 around the centreline
    double vein_width_max = 3.0;
    double background_level = 0.65;
    double vein_depth = 0.3;
    double noise_sigma = 0.02;
    double blur_sigma = 1.0;

    void validate() const;
};

/// One drawn vein: a quadratic Bezier centreline.
struct VeinCurve {
    double x0, y0, x1, y1, x2, y2;  ///< control points, x = column, y = row
    double width;
    double length;
};

struct Phantom {
    GrayImage image;
    BinaryMask truth;
    std::vector<VeinCurve> veins;
};

/// Dark Gaussian-profile veins on a flat background, blurred, noised,
/// clamped and quantized to 8-bit levels. Deterministic per seed.
Phantom gen_phantom(const PhantomSpec& spec);

/// Adds seeded zero-mean Gaussian noise and clamps to [0,1].
GrayImage add_gaussian_noise(const GrayImage& img, double sigma, std::uint64_t seed);

/// Separable Gaussian blur with replicated borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

}  // namespace veinx
