#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veinx/image.hpp"

namespace veinx {

/// Result of any of the four clusterers. Labels are 0-based cluster
/// indices; `centers[label]` is the intensity center of a pixel's cluster.
struct ClusterModel {
    int k = 0;
    std::vector<double> centers;
    Grid<int> labels;
    std::vector<std::size_t> populations;
    int iterations = 0;
    bool converged = false;
    double elapsed = 0.0;  ///< wall-clock seconds
};

/// Equally spaced initialization over the image's intensity span.
struct ClusterInit {
    double min_value = 0.0;
    double i_range = 0.0;
    double step_size = 0.0;
    std::vector<double> initial_centers;

    /// [lower, upper] intensity bounds of initial interval `i`.
    std::pair<double, double> interval(int i) const {
        return {min_value + i * step_size, min_value + (i + 1) * step_size};
    }
};

ClusterInit make_cluster_init(double min_value, double max_value, int k);

enum class ClusterAlgo { Optimized, KMeans, Fcm, Otsu };

std::string_view to_string(ClusterAlgo algo);
ClusterAlgo parse_cluster_algo(std::string_view name);

inline constexpr int kDefaultMaxIter = 100;

/// Deterministic intensity clustering: interval-midpoint initialization
/// followed by Lloyd alternation on the image's distinct intensities.
ClusterModel cluster_optimized(const GrayImage& img, int k, int max_iter = kDefaultMaxIter);

/// Classic per-pixel k-means seeded with k distinct pixel values.
ClusterModel cluster_kmeans(const GrayImage& img, int k, std::uint64_t seed, int max_iter = kDefaultMaxIter);

struct FcmOptions {
    double m = 2.0;
    double eps = 1e-4;
    std::uint64_t seed = 1;
    int max_iter = kDefaultMaxIter;
};

ClusterModel cluster_fcm(const GrayImage& img, int k, const FcmOptions& options);

/// Fills `row` with the fuzzy memberships of `x` to `centers` (sums to 1).
/// A zero distance gives membership 1 to the first such center.
void fuzzy_memberships(double x, std::span<const double> centers, double m, std::span<double> row);

/// Two-threshold Otsu over a 256-bin histogram.
struct OtsuThresholds {
    int t1 = 0;  ///< class 0 = bins [0, t1]
    int t2 = 0;  ///< class 1 = bins (t1, t2], class 2 = bins (t2, 255]
    double between_variance = 0.0;
};

OtsuThresholds otsu_double_thresholds(std::span<const std::size_t> histogram);
ClusterModel threshold_otsu_double(const GrayImage& img);

/// Marks pixels whose cluster has the lowest center among populated clusters.
BinaryMask localize(const GrayImage& img, const ClusterModel& model);

/// Label index of the darkest populated cluster.
int darkest_cluster(const ClusterModel& model);

struct ClusterRunOptions {
    int max_iter = kDefaultMaxIter;
    std::uint64_t seed = 1;
    double fcm_m = 2.0;
    double fcm_eps = 1e-4;
};

ClusterModel run_clusterer(ClusterAlgo algo, const GrayImage& img, int k, const ClusterRunOptions& options);

/// Label visualization: label l of k maps to gray l/(k-1).
GrayImage label_image(const ClusterModel& model);

}  // namespace veinx
