#include "veinx/gpo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace veinx {

namespace {

double wrap_half_turn(double angle) {
    double wrapped = std::fmod(angle, std::numbers::pi);
    if (wrapped < 0.0) {
        wrapped += std::numbers::pi;
    }
    return wrapped >= std::numbers::pi ? 0.0 : wrapped;
}

double bilinear(const GrayImage& img, double row, double col) {
    const double r = std::clamp(row, 0.0, static_cast<double>(img.height() - 1));
    const double c = std::clamp(col, 0.0, static_cast<double>(img.width() - 1));
    const int r0 = static_cast<int>(std::floor(r));
    const int c0 = static_cast<int>(std::floor(c));
    const double fr = r - r0;
    const double fc = c - c0;
    const double top = (1.0 - fc) * img.clamped(r0, c0) + fc * img.clamped(r0, c0 + 1);
    const double bottom = (1.0 - fc) * img.clamped(r0 + 1, c0) + fc * img.clamped(r0 + 1, c0 + 1);
    return (1.0 - fr) * top + fr * bottom;
}

int block_count(int extent, int block) { return (extent + block - 1) / block; }

}  // namespace

Grid<double> GradientPair::magnitude() const {
    Grid<double> out(gx.rows(), gx.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.values()[i] = std::hypot(gx.values()[i], gy.values()[i]);
    }
    return out;
}

Grid<double> GradientPair::magnitude_l1() const {
    Grid<double> out(gx.rows(), gx.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.values()[i] = std::abs(gx.values()[i]) + std::abs(gy.values()[i]);
    }
    return out;
}

GradientPair sobel_gradients(const GrayImage& img) {
    if (img.width() < 3 || img.height() < 3) {
        throw InvalidArgument("Sobel needs an image of at least 3x3");
    }
    const int rows = img.height();
    const int cols = img.width();
    GradientPair g{Grid<double>(rows, cols), Grid<double>(rows, cols)};
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double tl = img.clamped(r - 1, c - 1), tc = img.clamped(r - 1, c), tr = img.clamped(r - 1, c + 1);
            const double ml = img.clamped(r, c - 1), mr = img.clamped(r, c + 1);
            const double bl = img.clamped(r + 1, c - 1), bc = img.clamped(r + 1, c), br = img.clamped(r + 1, c + 1);
            g.gx(r, c) = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            g.gy(r, c) = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
        }
    }
    return g;
}

OrientationField estimate_orientation(const GrayImage& img, int block_size) {
    if (block_size < 4) {
        throw InvalidArgument("orientation block size must be >= 4");
    }
    if (img.width() < block_size || img.height() < block_size) {
        throw InvalidArgument("image smaller than one orientation block");
    }
    const GradientPair g = sobel_gradients(img);
    const int brows = block_count(img.height(), block_size);
    const int bcols = block_count(img.width(), block_size);

    // Doubled-angle vector per block: (cos 2t, sin 2t) of the dominant gradient.
    Grid<double> cos2(brows, bcols), sin2(brows, bcols);
    OrientationField field{block_size, Grid<double>(brows, bcols), Grid<double>(brows, bcols)};
    Grid<std::uint8_t> degenerate(brows, bcols, 0);
    for (int br = 0; br < brows; ++br) {
        for (int bc = 0; bc < bcols; ++bc) {
            double vx = 0.0, vy = 0.0, energy = 0.0;
            const int r_end = std::min((br + 1) * block_size, img.height());
            const int c_end = std::min((bc + 1) * block_size, img.width());
            for (int r = br * block_size; r < r_end; ++r) {
                for (int c = bc * block_size; c < c_end; ++c) {
                    const double gx = g.gx(r, c);
                    const double gy = g.gy(r, c);
                    vx += 2.0 * gx * gy;
                    vy += gx * gx - gy * gy;
                    energy += gx * gx + gy * gy;
                }
            }
            const double strength = std::hypot(vx, vy);
            if (energy <= 0.0 || strength <= 1e-12 * energy) {
                degenerate(br, bc) = 1;
                continue;
            }
            field.coherence(br, bc) = std::min(strength / energy, 1.0);
            const double theta = 0.5 * std::atan2(vx, vy);
            cos2(br, bc) = std::cos(2.0 * theta);
            sin2(br, bc) = std::sin(2.0 * theta);
        }
    }

    for (int br = 0; br < brows; ++br) {
        for (int bc = 0; bc < bcols; ++bc) {
            if (degenerate(br, bc)) {
                continue;  // angle 0, coherence 0
            }
            double sc = 0.0, ss = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const int r = br + dr, c = bc + dc;
                    if (r < 0 || c < 0 || r >= brows || c >= bcols) {
                        continue;
                    }
                    sc += cos2(r, c);
                    ss += sin2(r, c);
                }
            }
            // Gradient direction + 90 degrees = ridge direction.
            const double gradient_angle = 0.5 * std::atan2(ss, sc);
            field.angles(br, bc) = wrap_half_turn(gradient_angle + std::numbers::pi / 2.0);
        }
    }
    return field;
}

OrientationField uniform_orientation(int width, int height, int block_size, double angle) {
    if (block_size < 1) {
        throw InvalidArgument("block size must be positive");
    }
    const int brows = block_count(height, block_size);
    const int bcols = block_count(width, block_size);
    return {block_size, Grid<double>(brows, bcols, wrap_half_turn(angle)), Grid<double>(brows, bcols, 1.0)};
}

std::vector<double> x_signature(const GrayImage& img, double row, double col, double ridge_angle, int w, int l) {
    const double along_c = std::cos(ridge_angle);
    const double along_r = std::sin(ridge_angle);
    std::vector<double> signature(l);
    for (int k = 0; k < l; ++k) {
        const double across = k - l / 2.0;
        double acc = 0.0;
        for (int d = 0; d < w; ++d) {
            const double along = d - w / 2.0;
            const double c = col + along * along_c - across * along_r;
            const double r = row + along * along_r + across * along_c;
            acc += bilinear(img, r, c);
        }
        signature[k] = acc / w;
    }
    return signature;
}

double signature_period(const std::vector<double>& signature) {
    const int l = static_cast<int>(signature.size());
    if (l < 3) {
        return 0.0;
    }
    std::vector<double> smooth(l);
    for (int k = 0; k < l; ++k) {
        const int lo = std::max(k - 1, 0);
        const int hi = std::min(k + 1, l - 1);
        double acc = 0.0;
        for (int i = lo; i <= hi; ++i) {
            acc += signature[i];
        }
        smooth[k] = acc / (hi - lo + 1);
    }
    // Rounding ripple on a flat profile must not count as ridges.
    const auto [lo_it, hi_it] = std::minmax_element(smooth.begin(), smooth.end());
    if (*hi_it - *lo_it <= 1e-9) {
        return 0.0;
    }
    double mean = 0.0;
    for (double v : smooth) {
        mean += v;
    }
    mean /= l;

    int first = -1, last = -1, peaks = 0;
    for (int k = 1; k + 1 < l; ++k) {
        if (smooth[k] > smooth[k - 1] && smooth[k] > smooth[k + 1] && smooth[k] > mean) {
            if (first < 0) {
                first = k;
            }
            last = k;
            ++peaks;
        }
    }
    if (peaks < 2) {
        return 0.0;
    }
    return static_cast<double>(last - first) / (peaks - 1);
}

FrequencyMap estimate_frequency(const GrayImage& img, const OrientationField& field, int block_size,
                                int window_length) {
    if (field.block_size != block_size) {
        throw InvalidArgument("orientation field block size differs from frequency block size");
    }
    if (window_length < 2 * block_size) {
        throw InvalidArgument("frequency window length must be >= 2 * block size");
    }
    const int brows = block_count(img.height(), block_size);
    const int bcols = block_count(img.width(), block_size);
    if (field.block_rows() != brows || field.block_cols() != bcols) {
        throw InvalidArgument("orientation field does not cover the image");
    }
    FrequencyMap map{block_size, Grid<double>(brows, bcols), Grid<std::uint8_t>(brows, bcols)};
    for (int br = 0; br < brows; ++br) {
        for (int bc = 0; bc < bcols; ++bc) {
            const double row = br * block_size + block_size / 2.0;
            const double col = bc * block_size + block_size / 2.0;
            const auto sig = x_signature(img, row, col, field.angles(br, bc), block_size, window_length);
            const double period = signature_period(sig);
            if (period <= 0.0) {
                continue;
            }
            const double freq = 1.0 / period;
            if (freq >= kMinRidgeFrequency && freq <= kMaxRidgeFrequency) {
                map.freqs(br, bc) = freq;
                map.valid(br, bc) = 1;
            }
        }
    }
    return map;
}

}  // namespace veinx
