#pragma once

#include <filesystem>

#include "veinx/image.hpp"

namespace veinx {

class IoError : public Error {
public:
    using Error::Error;
};

class FileNotFound : public IoError {
public:
    using IoError::IoError;
};

class UnsupportedFormat : public IoError {
public:
    using IoError::IoError;
};

class CorruptFile : public IoError {
public:
    using IoError::IoError;
};

/// Reads an 8-bit grayscale PGM (P5, maxval 255) or an 8-bit gray/RGB PNG.
/// Each sample v becomes v/255; RGB is reduced with 0.299/0.587/0.114 luma.
GrayImage load_image(const std::filesystem::path& path);

/// Loads a mask image; samples >= 128 become 1.
BinaryMask load_mask(const std::filesystem::path& path);

/// Writes a P5 PGM, sample = round-half-up(intensity * 255).
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// Writes a P5 PGM with 1 -> 255 and 0 -> 0.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace veinx
