#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "veinx/image.hpp"

namespace veinx::testing {

inline GrayImage random_image(int width, int height, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Grid<double> px(height, width);
    for (double& v : px.values()) v = dist(rng);
    return GrayImage(std::move(px));
}

/// Random image whose samples are exact multiples of 1/255.
inline GrayImage random_byte_image(int width, int height, std::uint64_t seed, int lo = 0, int hi = 255) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(lo, hi);
    Grid<double> px(height, width);
    for (double& v : px.values()) v = dist(rng) / 255.0;
    return GrayImage(std::move(px));
}

inline BinaryMask random_mask(int width, int height, std::uint64_t seed, double density = 0.5) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bit(density);
    Grid<std::uint8_t> bits(height, width);
    for (auto& b : bits.values()) b = bit(rng) ? 1 : 0;
    return BinaryMask(std::move(bits));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("veinx_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Raster bytes of a P5 file written by this library (header is three lines).
inline std::vector<std::uint8_t> pgm_raster(const std::filesystem::path& path) {
    const std::string bytes = read_bytes(path);
    std::size_t pos = 0;
    for (int newlines = 0; newlines < 3; ++pos) {
        if (bytes.at(pos) == '\n') ++newlines;
    }
    return {bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end()};
}

}  // namespace veinx::testing
