#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "veinx/clustering.hpp"
#include "veinx/gpo.hpp"
#include "veinx/image.hpp"
#include "veinx/preprocess.hpp"

namespace veinx {

/// Square, unit-sum, point-symmetric filter kernel.
class Kernel {
public:
    /// Validates odd size, non-negative weights, unit sum and symmetry.
    static Kernel from_weights(int size, std::vector<double> weights, double sigma = 0.0);

    int size() const { return size_; }
    int radius() const { return size_ / 2; }
    double sigma() const { return sigma_; }
    double operator()(int dr, int dc) const { return weights_(dr + radius(), dc + radius()); }
    const Grid<double>& weights() const { return weights_; }

private:
    Kernel(int size, double sigma, Grid<double> weights) : size_(size), sigma_(sigma), weights_(std::move(weights)) {}

    int size_ = 0;
    double sigma_ = 0.0;
    Grid<double> weights_;
};

/// Sampled isotropic Gaussian, renormalized to unit sum.
Kernel gaussian_kernel(double sigma, int size);

/// Default kernel side for a given sigma: 2*ceil(3*sigma)+1.
int default_kernel_size(double sigma);

GrayImage matched_filter(const GrayImage& img, const Kernel& kernel);

struct CurvatureScore {
    Grid<double> scores;

    int width() const { return scores.cols(); }
    int height() const { return scores.rows(); }
};

/// Valley-centre scores before the connection pass: for every profile in
/// the four directions, each concave run contributes kappa_max * run
/// length at the position of its curvature maximum.
Grid<double> curvature_centers(const GrayImage& img, double sigma);

/// Connection pass: in each direction a pixel takes the weaker of its best
/// neighbours one and two steps away on either side; the result is the
/// maximum over directions. Neighbours one pixel off the line also count,
/// so staircase steps do not break a line and traced lines gain a
/// one-pixel shoulder on either side.
Grid<double> connect_centers(const Grid<double>& centers);

/// Maximum-curvature valley detector (dark lines score high).
CurvatureScore max_curvature(const GrayImage& img, double sigma);

/// Threshold at the given nearest-rank percentile of the strictly positive scores.
BinaryMask binarize_scores(const CurvatureScore& score, double percentile);

/// Digital line segment through the origin.
struct StructElem {
    int length = 0;
    double angle = 0.0;
    std::vector<std::pair<int, int>> offsets;  ///< (drow, dcol)
};

/// Bresenham-style line of `length` pixels (rounded up to odd) at `angle`,
/// measured like OrientationField angles.
StructElem line_structuring_element(int length, double angle);

/// Whole-image closing with one structuring element. Pixels outside the
/// image count as 0 for dilation and 1 for erosion.
BinaryMask close_with(const BinaryMask& mask, const StructElem& se);

/// Per-block closing with a line SE at each block's orientation.
BinaryMask close_oriented(const BinaryMask& mask, const OrientationField& field, int se_length);

/// Deletes 8-connected components smaller than `min_area` pixels.
BinaryMask remove_small(const BinaryMask& mask, int min_area);

/// Filtering mask with the top half rows at -1 and the bottom half at +1.
Grid<int> pre_mask(int height, int width);

struct ExtractParams {
    bool preprocess = true;
    PreprocessParams pre;
    ClusterAlgo algo = ClusterAlgo::Optimized;
    int k_override = 0;  ///< 0 = use the quantization level count
    ClusterRunOptions cluster;
    int localize_margin = 3;
    double sigma = 2.5;
    int kernel_size = 0;  ///< 0 = default_kernel_size(sigma)
    double percentile = 85.0;
    int block_size = 16;
    int se_length = 5;
    int min_area = 30;

    void validate() const;
};

struct ExtractionTrace {
    GrayImage filtered;
    BinaryMask localized;
    CurvatureScore score;
    BinaryMask binarized;
    OrientationField field;
    BinaryMask closed;
    BinaryMask mask;
};

ExtractionTrace extract_pattern_traced(const GrayImage& img, const ExtractParams& params);
BinaryMask extract_pattern(const GrayImage& img, const ExtractParams& params);

}  // namespace veinx
