#include "veinx/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

namespace veinx {

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw FileNotFound("no such file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class HeaderReader {
public:
    explicit HeaderReader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

    std::optional<long> next_int() {
        skip_space_and_comments();
        long value = 0;
        std::size_t digits = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) {
                return std::nullopt;
            }
            ++pos_;
            ++digits;
        }
        if (digits == 0) {
            return std::nullopt;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    bool consume_single_space() {
        if (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::size_t position() const { return pos_; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 2;
};

GrayImage decode_pgm(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
    HeaderReader reader(bytes);
    auto width = reader.next_int();
    auto height = reader.next_int();
    auto maxval = reader.next_int();
    if (!width || !height || !maxval || *width < 1 || *height < 1 || !reader.consume_single_space()) {
        throw CorruptFile("corrupt PGM header: " + path.string());
    }
    if (*maxval != 255) {
        throw UnsupportedFormat("only 8-bit PGM (maxval 255) is supported: " + path.string());
    }
    std::size_t count = static_cast<std::size_t>(*width) * static_cast<std::size_t>(*height);
    if (bytes.size() - reader.position() < count) {
        throw CorruptFile("truncated PGM raster: " + path.string());
    }
    std::vector<double> pixels(count);
    const unsigned char* raster = bytes.data() + reader.position();
    for (std::size_t i = 0; i < count; ++i) {
        pixels[i] = raster[i] / 255.0;
    }
    return GrayImage(static_cast<int>(*width), static_cast<int>(*height), std::move(pixels));
}

GrayImage decode_png(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw CorruptFile("corrupt PNG (" + std::string(image.message) + "): " + path.string());
    }
    const auto source_format = image.format;
    if ((source_format & PNG_FORMAT_FLAG_LINEAR) || (source_format & PNG_FORMAT_FLAG_ALPHA)) {
        png_image_free(&image);
        throw UnsupportedFormat("only 8-bit grayscale or RGB PNG is supported: " + path.string());
    }
    const bool color = (source_format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw CorruptFile("corrupt PNG (" + msg + "): " + path.string());
    }
    const int width = static_cast<int>(image.width);
    const int height = static_cast<int>(image.height);
    std::vector<double> pixels(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (color) {
            double luma = 0.299 * buffer[3 * i] + 0.587 * buffer[3 * i + 1] + 0.114 * buffer[3 * i + 2];
            pixels[i] = std::min(luma / 255.0, 1.0);
        } else {
            pixels[i] = buffer[i] / 255.0;
        }
    }
    return GrayImage(width, height, std::move(pixels));
}

void write_pgm(int width, int height, const std::vector<unsigned char>& raster,
               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write: " + path.string());
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    static constexpr std::array<unsigned char, 8> kPngMagic = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= kPngMagic.size() && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) {
        return decode_png(bytes, path);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
        return decode_pgm(bytes, path);
    }
    throw UnsupportedFormat("unsupported image format: " + path.string());
}

BinaryMask load_mask(const std::filesystem::path& path) {
    const GrayImage img = load_image(path);
    Grid<std::uint8_t> bits(img.height(), img.width());
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            bits(r, c) = to_byte(img(r, c)) >= 128 ? 1 : 0;
        }
    }
    return BinaryMask(std::move(bits));
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<unsigned char> raster;
    raster.reserve(img.size());
    for (double v : img.values()) {
        raster.push_back(to_byte(v));
    }
    write_pgm(img.width(), img.height(), raster, path);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<unsigned char> raster;
    raster.reserve(mask.size());
    for (auto bit : mask.values()) {
        raster.push_back(bit ? 255 : 0);
    }
    write_pgm(mask.width(), mask.height(), raster, path);
}

}  // namespace veinx
