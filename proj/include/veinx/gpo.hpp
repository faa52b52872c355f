#pragma once

#include <vector>

#include "veinx/image.hpp"

namespace veinx {

/// Signed 3x3 Sobel responses. gx differentiates along columns (x),
/// gy along rows (y grows downward).
struct GradientPair {
    Grid<double> gx;
    Grid<double> gy;

    Grid<double> magnitude() const;           ///< sqrt(gx^2 + gy^2)
    Grid<double> magnitude_l1() const;        ///< |gx| + |gy|
};

/// Block-wise ridge direction. Angles are measured from the +x (column)
/// axis toward +y (down the rows) and point ALONG the ridge, in [0, pi).
struct OrientationField {
    int block_size = 16;
    Grid<double> angles;
    Grid<double> coherence;

    int block_rows() const { return angles.rows(); }
    int block_cols() const { return angles.cols(); }
};

/// Ridge frequency in cycles/pixel per block; invalid blocks carry 0.
struct FrequencyMap {
    int block_size = 16;
    Grid<double> freqs;
    Grid<std::uint8_t> valid;
};

inline constexpr double kMinRidgeFrequency = 1.0 / 25.0;
inline constexpr double kMaxRidgeFrequency = 1.0 / 3.0;

GradientPair sobel_gradients(const GrayImage& img);

OrientationField estimate_orientation(const GrayImage& img, int block_size = 16);

/// Builds a field with a single angle for every block (coherence 1).
OrientationField uniform_orientation(int width, int height, int block_size, double angle);

/// The l-sample profile across the ridges of one block, centred on
/// pixel (row, col): each sample averages `w` points along the ridge.
std::vector<double> x_signature(const GrayImage& img, double row, double col, double ridge_angle, int w, int l);

/// Period estimate of a signature: mean spacing of strict local maxima
/// (after a 3-tap moving average) that exceed the signature mean.
/// Returns 0 when fewer than two peaks exist.
double signature_period(const std::vector<double>& signature);

FrequencyMap estimate_frequency(const GrayImage& img, const OrientationField& field, int block_size = 16,
                                int window_length = 32);

}  // namespace veinx
