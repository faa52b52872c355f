#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace veinx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Row-major 2-D grid. Used directly for intermediate numeric fields
/// (gradients, scores) and wrapped by GrayImage / BinaryMask.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}
    Grid(int rows, int cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != checked_size(rows, cols)) {
            throw InvalidArgument("grid data size does not match dimensions");
        }
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    /// Clamped access: coordinates outside the grid read the nearest edge sample.
    const T& clamped(int r, int c) const {
        r = r < 0 ? 0 : (r >= rows_ ? rows_ - 1 : r);
        c = c < 0 ? 0 : (c >= cols_ ? cols_ - 1 : c);
        return (*this)(r, c);
    }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }

    bool operator==(const Grid&) const = default;

private:
    static std::size_t checked_size(int rows, int cols) {
        if (rows < 0 || cols < 0) {
            throw InvalidArgument("grid dimensions must be non-negative");
        }
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

/// Grayscale image with intensities normalized to [0,1].
///
/// Construction validates that every sample is finite and inside [0,1];
/// use `from_clamped` when the values come out of a filter that may
/// overshoot slightly.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    explicit GrayImage(Grid<double> pixels);
    GrayImage(int width, int height, std::vector<double> pixels);

    /// Clamps every sample into [0,1]; NaN is rejected.
    static GrayImage from_clamped(Grid<double> pixels);

    int width() const { return pixels_.cols(); }
    int height() const { return pixels_.rows(); }
    std::size_t size() const { return pixels_.size(); }

    double operator()(int row, int col) const { return pixels_(row, col); }
    double clamped(int row, int col) const { return pixels_.clamped(row, col); }

    std::span<const double> values() const { return pixels_.values(); }
    const Grid<double>& grid() const { return pixels_; }

    bool operator==(const GrayImage&) const = default;

private:
    Grid<double> pixels_;
};

/// Binary pattern; every element is exactly 0 or 1.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, std::uint8_t fill = 0);
    explicit BinaryMask(Grid<std::uint8_t> bits);

    int width() const { return bits_.cols(); }
    int height() const { return bits_.rows(); }
    std::size_t size() const { return bits_.size(); }

    std::uint8_t operator()(int row, int col) const { return bits_(row, col); }
    void set(int row, int col, bool on) { bits_(row, col) = on ? 1 : 0; }

    std::span<const std::uint8_t> values() const { return bits_.values(); }
    const Grid<std::uint8_t>& grid() const { return bits_; }
    std::size_t count() const;

    bool operator==(const BinaryMask&) const = default;

private:
    Grid<std::uint8_t> bits_;
};

/// Quantizes intensity to an 8-bit sample with round-half-up.
inline std::uint8_t to_byte(double intensity) {
    const double clamped = intensity < 0.0 ? 0.0 : (intensity > 1.0 ? 1.0 : intensity);
    // Non-negative, so truncation equals floor.
    return static_cast<std::uint8_t>(clamped * 255.0 + 0.5);
}

}  // namespace veinx
