#include "veinx/clustering.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace veinx {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_k(const GrayImage& img, int k) {
    if (k < 1) {
        throw InvalidArgument("cluster count must be >= 1");
    }
    if (img.size() == 0) {
        throw InvalidArgument("cannot cluster an empty image");
    }
}

// Index of the nearest center by absolute difference; ties go to the lowest index.
int nearest_center(double x, std::span<const double> centers) {
    int best = 0;
    double best_dist = std::abs(x - centers[0]);
    for (int j = 1; j < static_cast<int>(centers.size()); ++j) {
        const double dist = std::abs(x - centers[j]);
        if (dist < best_dist) {
            best_dist = dist;
            best = j;
        }
    }
    return best;
}

// Distinct intensities of an image with multiplicities, plus a way to map
// each pixel back to its distinct-value index.
class IntensityTable {
public:
    explicit IntensityTable(std::span<const double> pixels) {
        // Fast path: at most one exact value per 8-bit bin (true for any
        // image loaded from an 8-bit file or quantized to levels).
        std::array<std::size_t, 256> bin_count{};
        std::array<double, 256> bin_value{};
        bool ok = true;
        for (double x : pixels) {
            const int bin = to_byte(x);
            if (bin_count[bin]++ == 0) {
                bin_value[bin] = x;
            } else if (bin_value[bin] != x) {
                ok = false;
                break;
            }
        }
        if (ok) {
            binned_ = true;
            slot_of_bin_.fill(-1);
            for (int bin = 0; bin < 256; ++bin) {
                if (bin_count[bin] > 0) {
                    slot_of_bin_[bin] = static_cast<int>(values_.size());
                    values_.push_back(bin_value[bin]);
                    counts_.push_back(bin_count[bin]);
                }
            }
            return;
        }
        std::vector<double> sorted(pixels.begin(), pixels.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) {
                ++j;
            }
            values_.push_back(sorted[i]);
            counts_.push_back(j - i);
            i = j;
        }
    }

    std::span<const double> values() const { return values_; }
    std::span<const std::size_t> counts() const { return counts_; }

    int index_of(double x) const {
        if (binned_) {
            return slot_of_bin_[to_byte(x)];
        }
        return static_cast<int>(std::lower_bound(values_.begin(), values_.end(), x) - values_.begin());
    }

private:
    bool binned_ = false;
    std::array<int, 256> slot_of_bin_{};
    std::vector<double> values_;
    std::vector<std::size_t> counts_;
};

std::vector<double> distinct_values(std::span<const double> pixels) {
    std::vector<double> sorted(pixels.begin(), pixels.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sorted;
}

// k distinct pixel intensities chosen by the seeded generator, ascending.
std::vector<double> seeded_centers(const GrayImage& img, int k, std::uint64_t seed) {
    std::vector<double> distinct = distinct_values(img.values());
    if (static_cast<int>(distinct.size()) < k) {
        throw InvalidArgument("cannot initialize " + std::to_string(k) + " clusters from " +
                              std::to_string(distinct.size()) + " distinct intensities");
    }
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first k slots become the sample.
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), distinct.size() - 1);
        std::swap(distinct[i], distinct[pick(rng)]);
    }
    std::vector<double> centers(distinct.begin(), distinct.begin() + k);
    std::sort(centers.begin(), centers.end());
    return centers;
}

std::vector<std::size_t> count_labels(const Grid<int>& labels, int k) {
    std::vector<std::size_t> pop(k, 0);
    for (int label : labels.values()) {
        ++pop[label];
    }
    return pop;
}

}  // namespace

ClusterInit make_cluster_init(double min_value, double max_value, int k) {
    if (k < 1) {
        throw InvalidArgument("cluster count must be >= 1");
    }
    ClusterInit init;
    init.min_value = min_value;
    init.i_range = max_value - min_value;
    init.step_size = init.i_range / k;
    init.initial_centers.resize(k);
    for (int i = 1; i <= k; ++i) {
        init.initial_centers[i - 1] = min_value + init.i_range * (i - 0.5) / k;
    }
    return init;
}

std::string_view to_string(ClusterAlgo algo) {
    switch (algo) {
        case ClusterAlgo::Optimized: return "optimized";
        case ClusterAlgo::KMeans: return "kmeans";
        case ClusterAlgo::Fcm: return "fcm";
        case ClusterAlgo::Otsu: return "otsu";
    }
    return "unknown";
}

ClusterAlgo parse_cluster_algo(std::string_view name) {
    for (auto algo : {ClusterAlgo::Optimized, ClusterAlgo::KMeans, ClusterAlgo::Fcm, ClusterAlgo::Otsu}) {
        if (name == to_string(algo)) {
            return algo;
        }
    }
    throw InvalidArgument("unknown clustering algorithm: " + std::string(name));
}

// Rounding in the mean of identical values must not count as movement.
constexpr double kCenterTolerance = 1e-12;

ClusterModel cluster_optimized(const GrayImage& img, int k, int max_iter) {
    const auto start = Clock::now();
    check_k(img, k);

    const IntensityTable table(img.values());
    const auto values = table.values();
    const auto counts = table.counts();
    const ClusterInit init = make_cluster_init(values.front(), values.back(), k);

    ClusterModel model;
    model.k = k;
    model.centers = init.initial_centers;

    std::vector<int> assignment(values.size(), -1);
    std::vector<double> sums(k);
    std::vector<std::size_t> members(k);
    while (model.iterations < max_iter) {
        ++model.iterations;
        bool changed = false;
        for (std::size_t v = 0; v < values.size(); ++v) {
            const int j = nearest_center(values[v], model.centers);
            changed |= (j != assignment[v]);
            assignment[v] = j;
        }
        if (!changed) {
            model.converged = true;
            break;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(members.begin(), members.end(), 0);
        for (std::size_t v = 0; v < values.size(); ++v) {
            sums[assignment[v]] += values[v] * static_cast<double>(counts[v]);
            members[assignment[v]] += counts[v];
        }
        bool moved = false;
        for (int j = 0; j < k; ++j) {
            if (members[j] == 0) {
                continue;  // empty clusters keep their center
            }
            const double updated = sums[j] / static_cast<double>(members[j]);
            moved |= std::abs(updated - model.centers[j]) > kCenterTolerance;
            model.centers[j] = updated;
        }
        if (!moved) {
            model.converged = true;
            break;
        }
    }

    // Centers may have moved in the last permitted round; label against the final ones.
    for (std::size_t v = 0; v < values.size(); ++v) {
        assignment[v] = nearest_center(values[v], model.centers);
    }
    model.labels = Grid<int>(img.height(), img.width());
    model.populations.assign(k, 0);
    auto out = model.labels.values();
    const auto pixels = img.values();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        out[i] = assignment[table.index_of(pixels[i])];
    }
    for (std::size_t v = 0; v < values.size(); ++v) {
        model.populations[assignment[v]] += counts[v];
    }
    model.elapsed = seconds_since(start);
    return model;
}

ClusterModel cluster_kmeans(const GrayImage& img, int k, std::uint64_t seed, int max_iter) {
    const auto start = Clock::now();
    check_k(img, k);
    if (max_iter < 1) {
        throw InvalidArgument("max_iter must be >= 1");
    }

    ClusterModel model;
    model.k = k;
    model.centers = seeded_centers(img, k, seed);
    model.labels = Grid<int>(img.height(), img.width(), -1);

    const auto pixels = img.values();
    auto labels = model.labels.values();
    std::vector<double> sums(k);
    std::vector<std::size_t> members(k);
    while (model.iterations < max_iter) {
        ++model.iterations;
        bool changed = false;
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            int best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                const double d = pixels[i] - model.centers[j];
                const double dist = d * d;
                if (dist < best_dist) {
                    best_dist = dist;
                    best = j;
                }
            }
            changed |= (best != labels[i]);
            labels[i] = best;
        }
        if (!changed) {
            model.converged = true;
            break;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(members.begin(), members.end(), 0);
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            sums[labels[i]] += pixels[i];
            ++members[labels[i]];
        }
        bool moved = false;
        for (int j = 0; j < k; ++j) {
            if (members[j] == 0) {
                continue;
            }
            const double updated = sums[j] / static_cast<double>(members[j]);
            moved |= std::abs(updated - model.centers[j]) > kCenterTolerance;
            model.centers[j] = updated;
        }
        if (!moved) {
            model.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        labels[i] = nearest_center(pixels[i], model.centers);
    }
    model.populations = count_labels(model.labels, k);
    model.elapsed = seconds_since(start);
    return model;
}

void fuzzy_memberships(double x, std::span<const double> centers, double m, std::span<double> row) {
    const std::size_t k = centers.size();
    for (std::size_t j = 0; j < k; ++j) {
        if (x == centers[j]) {
            std::fill(row.begin(), row.end(), 0.0);
            row[j] = 1.0;
            return;
        }
    }
    const double exponent = 2.0 / (m - 1.0);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        row[j] = std::pow(std::abs(x - centers[j]), -exponent);
        total += row[j];
    }
    for (std::size_t j = 0; j < k; ++j) {
        row[j] /= total;
    }
}

ClusterModel cluster_fcm(const GrayImage& img, int k, const FcmOptions& options) {
    const auto start = Clock::now();
    check_k(img, k);
    if (!(options.m > 1.0)) {
        throw InvalidArgument("FCM fuzziness m must be > 1");
    }
    if (!(options.eps > 0.0)) {
        throw InvalidArgument("FCM tolerance must be > 0");
    }

    ClusterModel model;
    model.k = k;
    model.centers = seeded_centers(img, k, options.seed);

    const auto pixels = img.values();
    std::vector<double> row(k);
    std::vector<double> weighted(k);
    std::vector<double> weights(k);
    while (model.iterations < options.max_iter) {
        ++model.iterations;
        std::fill(weighted.begin(), weighted.end(), 0.0);
        std::fill(weights.begin(), weights.end(), 0.0);
        for (double x : pixels) {
            fuzzy_memberships(x, model.centers, options.m, row);
            for (int j = 0; j < k; ++j) {
                const double w = std::pow(row[j], options.m);
                weighted[j] += w * x;
                weights[j] += w;
            }
        }
        double shift = 0.0;
        for (int j = 0; j < k; ++j) {
            if (weights[j] > 0.0) {
                const double updated = weighted[j] / weights[j];
                shift = std::max(shift, std::abs(updated - model.centers[j]));
                model.centers[j] = updated;
            }
        }
        if (shift < options.eps) {
            model.converged = true;
            break;
        }
    }

    // Membership decreases with distance, so argmax membership is the nearest center.
    model.labels = Grid<int>(img.height(), img.width());
    auto labels = model.labels.values();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        labels[i] = nearest_center(pixels[i], model.centers);
    }
    model.populations = count_labels(model.labels, k);
    model.elapsed = seconds_since(start);
    return model;
}

OtsuThresholds otsu_double_thresholds(std::span<const std::size_t> histogram) {
    if (histogram.size() != 256) {
        throw InvalidArgument("Otsu histogram must have 256 bins");
    }
    // Only the split of occupied bins matters, so enumerate splits of the
    // occupied-bin list and map each to its lexicographically smallest
    // (t1, t2). Among equal scores the smallest pair wins, exactly as a
    // scan over all 256x256 pairs would.
    std::vector<int> occupied;
    for (int b = 0; b < 256; ++b) {
        if (histogram[b] > 0) {
            occupied.push_back(b);
        }
    }
    const int d = static_cast<int>(occupied.size());
    // Integer prefix sums over occupied bins keep the scores of identical
    // partitions bitwise equal.
    std::vector<std::uint64_t> count_prefix(d + 1, 0), moment_prefix(d + 1, 0);
    for (int i = 0; i < d; ++i) {
        const auto n = static_cast<std::uint64_t>(histogram[occupied[i]]);
        count_prefix[i + 1] = count_prefix[i] + n;
        moment_prefix[i + 1] = moment_prefix[i] + static_cast<std::uint64_t>(occupied[i]) * n;
    }
    auto class_score = [&](int lo, int hi) {  // occupied bins [lo, hi)
        const auto n = count_prefix[hi] - count_prefix[lo];
        if (n == 0) {
            return 0.0;
        }
        const double moment = static_cast<double>(moment_prefix[hi] - moment_prefix[lo]);
        return moment * moment / static_cast<double>(n);
    };
    std::vector<double> upper(d + 1);
    for (int b = 0; b <= d; ++b) {
        upper[b] = class_score(b, d);
    }

    const double total = static_cast<double>(count_prefix[d]);
    const double mean = static_cast<double>(moment_prefix[d]) / total;

    OtsuThresholds best;
    double best_score = -1.0;
    for (int a = 0; a <= d; ++a) {
        // class 0 holds the first a occupied bins
        if (a == 0 && d > 0 && occupied[0] == 0) {
            continue;
        }
        const int t1 = a == 0 ? 0 : occupied[a - 1];
        const double low = class_score(0, a);
        for (int b = a; b <= d; ++b) {
            // class 1 holds occupied bins [a, b)
            const int t2 = b == a ? t1 : occupied[b - 1];
            const double score = low + class_score(a, b) + upper[b];
            const bool better = score > best_score ||
                                (score == best_score && std::pair(t1, t2) < std::pair(best.t1, best.t2));
            if (better) {
                best_score = score;
                best.t1 = t1;
                best.t2 = t2;
            }
        }
    }
    best.between_variance = best_score / total - mean * mean;
    return best;
}

ClusterModel threshold_otsu_double(const GrayImage& img) {
    const auto start = Clock::now();
    const auto pixels = img.values();
    // Bytes first, in a branch-free loop the compiler can vectorize; the
    // same bytes then feed the histogram and the label lookup. Pixels are
    // already in [0,1], so no clamp is needed.
    std::vector<std::uint8_t> bytes(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        bytes[i] = static_cast<std::uint8_t>(static_cast<int>(pixels[i] * 255.0 + 0.5));
    }
    // Four interleaved histograms avoid stalls on runs of equal bins.
    std::array<std::array<std::size_t, 256>, 4> partial{};
    std::size_t i = 0;
    for (; i + 4 <= bytes.size(); i += 4) {
        ++partial[0][bytes[i]];
        ++partial[1][bytes[i + 1]];
        ++partial[2][bytes[i + 2]];
        ++partial[3][bytes[i + 3]];
    }
    for (; i < bytes.size(); ++i) {
        ++partial[0][bytes[i]];
    }
    std::array<std::size_t, 256> histogram{};
    for (int b = 0; b < 256; ++b) {
        histogram[b] = partial[0][b] + partial[1][b] + partial[2][b] + partial[3][b];
    }
    const auto occupied = std::count_if(histogram.begin(), histogram.end(), [](std::size_t c) { return c > 0; });
    if (occupied < 2) {
        throw InvalidArgument("degenerate histogram: Otsu needs at least two distinct intensities");
    }
    const OtsuThresholds t = otsu_double_thresholds(histogram);

    ClusterModel model;
    model.k = 3;
    model.iterations = 1;
    model.converged = true;
    std::array<int, 256> class_of_bin{};
    std::array<double, 3> sums{};
    model.populations.assign(3, 0);
    for (int b = 0; b < 256; ++b) {
        const int c = b <= t.t1 ? 0 : (b <= t.t2 ? 1 : 2);
        class_of_bin[b] = c;
        // Class means over the histogram, as Otsu defines them.
        sums[c] += (b / 255.0) * static_cast<double>(histogram[b]);
        model.populations[c] += histogram[b];
    }
    model.labels = Grid<int>(img.height(), img.width());
    auto labels = model.labels.values();
    for (std::size_t p = 0; p < pixels.size(); ++p) {
        labels[p] = class_of_bin[bytes[p]];
    }
    // Empty classes sit at the middle of their (pixel-free) bin interval.
    const std::array<std::pair<int, int>, 3> bounds = {{{0, t.t1}, {t.t1 + 1, t.t2}, {t.t2 + 1, 255}}};
    model.centers.resize(3);
    for (int c = 0; c < 3; ++c) {
        if (model.populations[c] > 0) {
            model.centers[c] = sums[c] / static_cast<double>(model.populations[c]);
        } else {
            const auto [lo, hi] = bounds[c];
            const double mid = lo <= hi ? 0.5 * (lo + hi) : t.t1 + 0.5;
            model.centers[c] = std::clamp(mid / 255.0, 0.0, 1.0);
        }
    }
    model.elapsed = seconds_since(start);
    return model;
}

int darkest_cluster(const ClusterModel& model) {
    int best = -1;
    for (int j = 0; j < model.k; ++j) {
        const bool populated = model.populations.empty() || model.populations[j] > 0;
        if (populated && (best < 0 || model.centers[j] < model.centers[best])) {
            best = j;
        }
    }
    return best < 0 ? 0 : best;
}

BinaryMask localize(const GrayImage& img, const ClusterModel& model) {
    if (model.labels.rows() != img.height() || model.labels.cols() != img.width()) {
        throw InvalidArgument("cluster model does not match image dimensions");
    }
    const int dark = darkest_cluster(model);
    Grid<std::uint8_t> bits(img.height(), img.width());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits.values()[i] = model.labels.values()[i] == dark ? 1 : 0;
    }
    return BinaryMask(std::move(bits));
}

ClusterModel run_clusterer(ClusterAlgo algo, const GrayImage& img, int k, const ClusterRunOptions& options) {
    switch (algo) {
        case ClusterAlgo::Optimized: return cluster_optimized(img, k, options.max_iter);
        case ClusterAlgo::KMeans: return cluster_kmeans(img, k, options.seed, options.max_iter);
        case ClusterAlgo::Fcm:
            return cluster_fcm(img, k, FcmOptions{options.fcm_m, options.fcm_eps, options.seed, options.max_iter});
        case ClusterAlgo::Otsu: return threshold_otsu_double(img);
    }
    throw InvalidArgument("unknown clustering algorithm");
}

GrayImage label_image(const ClusterModel& model) {
    Grid<double> gray(model.labels.rows(), model.labels.cols());
    const double scale = model.k > 1 ? 1.0 / (model.k - 1) : 0.0;
    for (std::size_t i = 0; i < gray.size(); ++i) {
        gray.values()[i] = model.labels.values()[i] * scale;
    }
    return GrayImage(std::move(gray));
}

}  // namespace veinx
