#include "veinx/extraction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>

namespace veinx {

namespace {

// 1-D kernel indexed by offset t in [-radius, radius].
struct Kernel1d {
    int radius = 0;
    std::vector<double> taps;
    double at(int t) const { return taps[t + radius]; }
};

// Gaussian and its first two derivatives, with discrete moments fixed so that
// they reproduce constants, slopes and curvature exactly.
std::array<Kernel1d, 3> gaussian_derivatives(double sigma) {
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::array<Kernel1d, 3> k;
    for (auto& kernel : k) {
        kernel.radius = radius;
        kernel.taps.resize(2 * radius + 1);
    }
    const double s2 = sigma * sigma;
    double sum0 = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double g = std::exp(-t * t / (2.0 * s2));
        k[0].taps[t + radius] = g;
        k[1].taps[t + radius] = -t / s2 * g;
        k[2].taps[t + radius] = (t * t / (s2 * s2) - 1.0 / s2) * g;
        sum0 += g;
    }
    double moment1 = 0.0, mean2 = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        k[0].taps[t + radius] /= sum0;
        moment1 += -t * k[1].taps[t + radius];
        mean2 += k[2].taps[t + radius];
    }
    mean2 /= (2 * radius + 1);
    double moment2 = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        k[1].taps[t + radius] /= moment1;
        k[2].taps[t + radius] -= mean2;
        moment2 += 0.5 * t * t * k[2].taps[t + radius];
    }
    for (double& v : k[2].taps) {
        v /= moment2;
    }
    return k;
}

// Separable convolution: `along_cols` runs over x, `along_rows` over y.
Grid<double> convolve_separable(const Grid<double>& src, const Kernel1d& along_cols, const Kernel1d& along_rows) {
    const int rows = src.rows(), cols = src.cols();
    Grid<double> tmp(rows, cols), out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int t = -along_cols.radius; t <= along_cols.radius; ++t) {
                acc += src.clamped(r, c - t) * along_cols.at(t);
            }
            tmp(r, c) = acc;
        }
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int t = -along_rows.radius; t <= along_rows.radius; ++t) {
                acc += tmp.clamped(r - t, c) * along_rows.at(t);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

struct Direction {
    int dr;
    int dc;
};

// Profile directions: 0, 90, 45 and 135 degrees (rows grow downward).
constexpr std::array<Direction, 4> kDirections = {{{0, 1}, {1, 0}, {1, 1}, {1, -1}}};

bool inside(const Grid<double>& g, int r, int c) { return r >= 0 && c >= 0 && r < g.rows() && c < g.cols(); }

// Calls visit(profile) for every maximal straight line of pixels along `dir`.
template <typename Visit>
void for_each_profile(int rows, int cols, Direction dir, Visit visit) {
    std::vector<std::pair<int, int>> line;
    auto walk = [&](int r, int c) {
        line.clear();
        while (r >= 0 && c >= 0 && r < rows && c < cols) {
            line.emplace_back(r, c);
            r += dir.dr;
            c += dir.dc;
        }
        visit(line);
    };
    if (dir.dr == 0) {
        for (int r = 0; r < rows; ++r) walk(r, 0);
    } else if (dir.dc == 0) {
        for (int c = 0; c < cols; ++c) walk(0, c);
    } else if (dir.dc > 0) {
        for (int c = cols - 1; c >= 0; --c) walk(0, c);
        for (int r = 1; r < rows; ++r) walk(r, 0);
    } else {
        for (int c = 0; c < cols; ++c) walk(0, c);
        for (int r = 1; r < rows; ++r) walk(r, cols - 1);
    }
}

}  // namespace

Kernel Kernel::from_weights(int size, std::vector<double> weights, double sigma) {
    if (size < 1 || size % 2 == 0) {
        throw InvalidArgument("kernel size must be odd and positive");
    }
    Grid<double> grid(size, size, std::move(weights));
    double sum = 0.0;
    for (double w : grid.values()) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidArgument("kernel weights must be finite and non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidArgument("kernel weights must sum to 1");
    }
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            if (std::abs(grid(r, c) - grid(size - 1 - r, size - 1 - c)) > 1e-12 ||
                std::abs(grid(r, c) - grid(r, size - 1 - c)) > 1e-12) {
                throw InvalidArgument("kernel weights must be symmetric");
            }
        }
    }
    return Kernel(size, sigma, std::move(grid));
}

int default_kernel_size(double sigma) { return 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1; }

Kernel gaussian_kernel(double sigma, int size) {
    if (!(sigma > 0.0)) {
        throw InvalidArgument("kernel sigma must be positive");
    }
    if (size < 3 || size % 2 == 0) {
        throw InvalidArgument("kernel size must be odd and >= 3");
    }
    const int radius = size / 2;
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(size) * size);
    double sum = 0.0;
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
            const double w = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            weights.push_back(w);
            sum += w;
        }
    }
    for (double& w : weights) {
        w /= sum;
    }
    return Kernel::from_weights(size, std::move(weights), sigma);
}

GrayImage matched_filter(const GrayImage& img, const Kernel& kernel) {
    if (kernel.size() > img.width() || kernel.size() > img.height()) {
        throw InvalidArgument("kernel larger than image");
    }
    const int radius = kernel.radius();
    Grid<double> out(img.height(), img.width());
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            double acc = 0.0;
            for (int dr = -radius; dr <= radius; ++dr) {
                for (int dc = -radius; dc <= radius; ++dc) {
                    acc += kernel(dr, dc) * img.clamped(r - dr, c - dc);
                }
            }
            out(r, c) = acc;
        }
    }
    return GrayImage::from_clamped(std::move(out));
}

// Rounding residue of the derivative filters on flat input is ~1e-16; one
// 8-bit step seen at sigma 10 still curves by ~1e-5.
constexpr double kCurvatureFloor = 1e-10;

Grid<double> curvature_centers(const GrayImage& img, double sigma) {
    if (!(sigma > 0.0)) {
        throw InvalidArgument("curvature sigma must be positive");
    }
    const auto [g, g1, g2] = gaussian_derivatives(sigma);
    const Grid<double>& src = img.grid();
    const Grid<double> fx = convolve_separable(src, g1, g);
    const Grid<double> fy = convolve_separable(src, g, g1);
    const Grid<double> fxx = convolve_separable(src, g2, g);
    const Grid<double> fyy = convolve_separable(src, g, g2);
    const Grid<double> fxy = convolve_separable(src, g1, g1);

    const int rows = img.height(), cols = img.width();
    Grid<double> centers(rows, cols, 0.0);
    Grid<double> kappa(rows, cols);
    for (std::size_t d = 0; d < kDirections.size(); ++d) {
        // Directional first/second derivatives along the unit profile direction.
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                double p1 = 0.0, p2 = 0.0;
                switch (d) {
                    case 0: p1 = fx(r, c); p2 = fxx(r, c); break;
                    case 1: p1 = fy(r, c); p2 = fyy(r, c); break;
                    case 2:
                        p1 = (fx(r, c) + fy(r, c)) / std::numbers::sqrt2;
                        p2 = 0.5 * (fxx(r, c) + 2.0 * fxy(r, c) + fyy(r, c));
                        break;
                    default:
                        p1 = (fy(r, c) - fx(r, c)) / std::numbers::sqrt2;
                        p2 = 0.5 * (fxx(r, c) - 2.0 * fxy(r, c) + fyy(r, c));
                        break;
                }
                const double k = p2 / std::pow(1.0 + p1 * p1, 1.5);
                kappa(r, c) = k > kCurvatureFloor ? k : 0.0;
            }
        }
        for_each_profile(rows, cols, kDirections[d], [&](const std::vector<std::pair<int, int>>& line) {
            std::size_t i = 0;
            while (i < line.size()) {
                if (kappa(line[i].first, line[i].second) <= 0.0) {
                    ++i;
                    continue;
                }
                std::size_t start = i, peak = i;
                double peak_kappa = kappa(line[i].first, line[i].second);
                while (i < line.size() && kappa(line[i].first, line[i].second) > 0.0) {
                    const double k = kappa(line[i].first, line[i].second);
                    if (k > peak_kappa) {
                        peak_kappa = k;
                        peak = i;
                    }
                    ++i;
                }
                const double width = static_cast<double>(i - start);
                centers(line[peak].first, line[peak].second) += peak_kappa * width;
            }
        });
    }
    return centers;
}

// Off-line support counts less, so a line's centre outscores its shoulder.
constexpr double kSlackWeight = 0.75;

Grid<double> connect_centers(const Grid<double>& centers) {
    const int rows = centers.rows(), cols = centers.cols();
    auto value = [&](int r, int c) { return inside(centers, r, c) ? centers(r, c) : 0.0; };
    Grid<double> out(rows, cols, 0.0);
    for (const Direction dir : kDirections) {
        // One-pixel sideways slack: (drow, 0) and (0, dcol) for diagonals, the
        // perpendicular unit step for axis directions.
        const Direction side_a = dir.dr != 0 && dir.dc != 0 ? Direction{dir.dr, 0} : Direction{dir.dc, dir.dr};
        const Direction side_b = dir.dr != 0 && dir.dc != 0 ? Direction{0, dir.dc} : Direction{-dir.dc, -dir.dr};
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                auto best = [&](int sign) {
                    double m = 0.0;
                    for (int k = 1; k <= 2; ++k) {
                        const int qr = r + sign * k * dir.dr, qc = c + sign * k * dir.dc;
                        m = std::max(m, value(qr, qc));
                        m = std::max(m, kSlackWeight * value(qr + sign * side_a.dr, qc + sign * side_a.dc));
                        m = std::max(m, kSlackWeight * value(qr + sign * side_b.dr, qc + sign * side_b.dc));
                    }
                    return m;
                };
                out(r, c) = std::max(out(r, c), std::min(best(1), best(-1)));
            }
        }
    }
    return out;
}

CurvatureScore max_curvature(const GrayImage& img, double sigma) {
    return {connect_centers(curvature_centers(img, sigma))};
}

BinaryMask binarize_scores(const CurvatureScore& score, double percentile) {
    if (!(percentile > 0.0) || percentile > 100.0) {
        throw InvalidArgument("percentile must be in (0, 100]");
    }
    std::vector<double> positive;
    for (double s : score.scores.values()) {
        if (s > 0.0) {
            positive.push_back(s);
        }
    }
    Grid<std::uint8_t> bits(score.height(), score.width(), 0);
    if (!positive.empty()) {
        std::sort(positive.begin(), positive.end());
        const auto n = positive.size();
        auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
        rank = std::clamp<std::size_t>(rank, 1, n);
        const double threshold = positive[rank - 1];
        for (std::size_t i = 0; i < bits.size(); ++i) {
            bits.values()[i] = score.scores.values()[i] >= threshold ? 1 : 0;
        }
    }
    return BinaryMask(std::move(bits));
}

StructElem line_structuring_element(int length, double angle) {
    if (length < 1) {
        throw InvalidArgument("structuring element length must be >= 1");
    }
    StructElem se;
    const int half = length / 2;
    se.length = 2 * half + 1;
    se.angle = angle;
    const double dc = std::cos(angle);
    const double dr = std::sin(angle);
    for (int t = -half; t <= half; ++t) {
        // Step one pixel per sample along the dominant axis; lround is odd-symmetric.
        int orow = 0, ocol = 0;
        if (std::abs(dc) >= std::abs(dr)) {
            ocol = dc >= 0 ? t : -t;
            orow = static_cast<int>(std::lround(ocol * dr / dc));
        } else {
            orow = dr >= 0 ? t : -t;
            ocol = static_cast<int>(std::lround(orow * dc / dr));
        }
        se.offsets.emplace_back(orow, ocol);
    }
    return se;
}

namespace {

// Closing evaluated only on [r0, r1) x [c0, c1), written into `out`.
void close_region(const BinaryMask& mask, const StructElem& se, int r0, int r1, int c0, int c1,
                  Grid<std::uint8_t>& out) {
    int reach = 0;
    for (auto [dr, dc] : se.offsets) {
        reach = std::max({reach, std::abs(dr), std::abs(dc)});
    }
    const int rows = mask.height(), cols = mask.width();
    const int dr0 = std::max(r0 - reach, 0), dr1 = std::min(r1 + reach, rows);
    const int dc0 = std::max(c0 - reach, 0), dc1 = std::min(c1 + reach, cols);
    Grid<std::uint8_t> dilated(dr1 - dr0, dc1 - dc0, 0);
    for (int r = dr0; r < dr1; ++r) {
        for (int c = dc0; c < dc1; ++c) {
            std::uint8_t v = 0;
            for (auto [dr, dc] : se.offsets) {
                const int rr = r + dr, cc = c + dc;
                if (rr >= 0 && cc >= 0 && rr < rows && cc < cols && mask(rr, cc)) {
                    v = 1;
                    break;
                }
            }
            dilated(r - dr0, c - dc0) = v;
        }
    }
    for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
            std::uint8_t v = 1;
            for (auto [dr, dc] : se.offsets) {
                const int rr = r + dr, cc = c + dc;
                if (rr >= 0 && cc >= 0 && rr < rows && cc < cols && !dilated(rr - dr0, cc - dc0)) {
                    v = 0;
                    break;
                }
            }
            out(r, c) = v;
        }
    }
}

}  // namespace

BinaryMask close_with(const BinaryMask& mask, const StructElem& se) {
    Grid<std::uint8_t> out = mask.grid();
    close_region(mask, se, 0, mask.height(), 0, mask.width(), out);
    return BinaryMask(std::move(out));
}

BinaryMask close_oriented(const BinaryMask& mask, const OrientationField& field, int se_length) {
    const int block = field.block_size;
    if (block < 1 || field.block_rows() * block < mask.height() || field.block_cols() * block < mask.width()) {
        throw InvalidArgument("orientation field does not cover the mask");
    }
    Grid<std::uint8_t> out = mask.grid();
    for (int br = 0; br * block < mask.height(); ++br) {
        for (int bc = 0; bc * block < mask.width(); ++bc) {
            if (field.coherence(br, bc) <= 0.0) {
                continue;
            }
            const StructElem se = line_structuring_element(se_length, field.angles(br, bc));
            close_region(mask, se, br * block, std::min((br + 1) * block, mask.height()), bc * block,
                         std::min((bc + 1) * block, mask.width()), out);
        }
    }
    return BinaryMask(std::move(out));
}

BinaryMask remove_small(const BinaryMask& mask, int min_area) {
    if (min_area < 0) {
        throw InvalidArgument("min_area must be >= 0");
    }
    const int rows = mask.height(), cols = mask.width();
    Grid<std::uint8_t> out = mask.grid();
    Grid<std::uint8_t> seen(rows, cols, 0);
    std::vector<std::pair<int, int>> component;
    std::deque<std::pair<int, int>> queue;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (!mask(r, c) || seen(r, c)) {
                continue;
            }
            component.clear();
            queue.emplace_back(r, c);
            seen(r, c) = 1;
            while (!queue.empty()) {
                auto [pr, pc] = queue.front();
                queue.pop_front();
                component.emplace_back(pr, pc);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int nr = pr + dr, nc = pc + dc;
                        if (nr >= 0 && nc >= 0 && nr < rows && nc < cols && mask(nr, nc) && !seen(nr, nc)) {
                            seen(nr, nc) = 1;
                            queue.emplace_back(nr, nc);
                        }
                    }
                }
            }
            if (static_cast<int>(component.size()) < min_area) {
                for (auto [pr, pc] : component) {
                    out(pr, pc) = 0;
                }
            }
        }
    }
    return BinaryMask(std::move(out));
}

Grid<int> pre_mask(int height, int width) {
    if (height < 1 || width < 1) {
        throw InvalidArgument("mask dimensions must be positive");
    }
    Grid<int> mask(height, width, 1);
    for (int r = 0; r < height / 2; ++r) {
        for (int c = 0; c < width; ++c) {
            mask(r, c) = -1;
        }
    }
    return mask;
}

void ExtractParams::validate() const {
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    if (kernel_size != 0 && (kernel_size < 3 || kernel_size % 2 == 0)) {
        throw InvalidArgument("kernel_size must be 0 (auto) or odd >= 3");
    }
    if (!(percentile > 0.0) || percentile > 100.0) throw InvalidArgument("percentile must be in (0, 100]");
    if (block_size < 4) throw InvalidArgument("block_size must be >= 4");
    if (se_length < 1) throw InvalidArgument("se_length must be >= 1");
    if (min_area < 0) throw InvalidArgument("min_area must be >= 0");
    if (k_override < 0) throw InvalidArgument("k must be >= 0");
    if (localize_margin < 0) throw InvalidArgument("localize_margin must be >= 0");
}

namespace {

BinaryMask dilate_square(const BinaryMask& mask, int radius) {
    if (radius == 0) {
        return mask;
    }
    const int rows = mask.height(), cols = mask.width();
    Grid<std::uint8_t> horizontal(rows, cols, 0), out(rows, cols, 0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (int d = std::max(c - radius, 0); d <= std::min(c + radius, cols - 1); ++d) {
                if (mask(r, d)) {
                    horizontal(r, c) = 1;
                    break;
                }
            }
        }
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (int d = std::max(r - radius, 0); d <= std::min(r + radius, rows - 1); ++d) {
                if (horizontal(d, c)) {
                    out(r, c) = 1;
                    break;
                }
            }
        }
    }
    return BinaryMask(std::move(out));
}

}  // namespace

ExtractionTrace extract_pattern_traced(const GrayImage& img, const ExtractParams& params) {
    params.validate();

    GrayImage base = img;
    GrayImage cluster_input = img;
    int k = params.k_override > 0 ? params.k_override : params.pre.adjust.level_count();
    if (params.preprocess) {
        PreprocessStages stages = preprocess(img, params.pre);
        if (params.k_override == 0) {
            // Seeded clusterers need k distinct intensities; unused levels are dropped.
            k = std::max(1, std::min(stages.quantized.k, stages.quantized.levels_present()));
        }
        base = std::move(stages.denoised);
        cluster_input = std::move(stages.quantized.image);
    }

    ExtractionTrace trace;
    const ClusterModel model = run_clusterer(params.algo, cluster_input, k, params.cluster);
    trace.localized = localize(cluster_input, model);
    const BinaryMask region = dilate_square(trace.localized, params.localize_margin);

    const int ksize = params.kernel_size > 0 ? params.kernel_size : default_kernel_size(params.sigma);
    trace.filtered = matched_filter(base, gaussian_kernel(params.sigma, ksize));
    trace.score = max_curvature(trace.filtered, params.sigma);
    for (std::size_t i = 0; i < trace.score.scores.size(); ++i) {
        if (!region.values()[i]) {
            trace.score.scores.values()[i] = 0.0;
        }
    }
    trace.binarized = binarize_scores(trace.score, params.percentile);
    trace.field = estimate_orientation(trace.filtered, params.block_size);
    trace.closed = close_oriented(trace.binarized, trace.field, params.se_length);
    trace.mask = remove_small(trace.closed, params.min_area);
    return trace;
}

BinaryMask extract_pattern(const GrayImage& img, const ExtractParams& params) {
    return extract_pattern_traced(img, params).mask;
}

}  // namespace veinx
