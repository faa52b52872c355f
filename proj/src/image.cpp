#include "veinx/image.hpp"

#include <algorithm>
#include <cmath>

namespace veinx {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be at least 1x1");
    }
}

void check_intensities(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw InvalidArgument("image intensity outside [0,1]: " + std::to_string(v));
        }
    }
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill) {
    check_dims(width, height);
    pixels_ = Grid<double>(height, width, fill);
    check_intensities(pixels_.values());
}

GrayImage::GrayImage(Grid<double> pixels) : pixels_(std::move(pixels)) {
    check_dims(pixels_.cols(), pixels_.rows());
    check_intensities(pixels_.values());
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels) {
    check_dims(width, height);
    pixels_ = Grid<double>(height, width, std::move(pixels));
    check_intensities(pixels_.values());
}

GrayImage GrayImage::from_clamped(Grid<double> pixels) {
    for (double& v : pixels.values()) {
        if (std::isnan(v)) {
            throw InvalidArgument("NaN intensity");
        }
        v = std::clamp(v, 0.0, 1.0);
    }
    return GrayImage(std::move(pixels));
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill) {
    check_dims(width, height);
    if (fill > 1) {
        throw InvalidArgument("mask fill must be 0 or 1");
    }
    bits_ = Grid<std::uint8_t>(height, width, fill);
}

BinaryMask::BinaryMask(Grid<std::uint8_t> bits) : bits_(std::move(bits)) {
    check_dims(bits_.cols(), bits_.rows());
    for (auto b : bits_.values()) {
        if (b > 1) {
            throw InvalidArgument("mask element must be 0 or 1");
        }
    }
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.values().begin(), bits_.values().end(), 1));
}


}  // namespace veinx
