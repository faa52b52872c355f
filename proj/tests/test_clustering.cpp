#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fixed_point_oracle.hpp"
#include "support.hpp"
#include "veinx/clustering.hpp"
#include "veinx/metrics.hpp"
#include "veinx/preprocess.hpp"
#include "veinx/synth.hpp"

namespace veinx {
namespace {

GrayImage row_image(const std::vector<double>& xs) { return GrayImage(static_cast<int>(xs.size()), 1, xs); }

void distinct_with_counts(const GrayImage& img, std::vector<double>& values, std::vector<std::size_t>& counts) {
    std::map<double, std::size_t> tally;
    for (double x : img.values()) ++tally[x];
    values.clear();
    counts.clear();
    for (auto [v, n] : tally) {
        values.push_back(v);
        counts.push_back(n);
    }
}

void expect_nearest_center(const ClusterModel& model, const GrayImage& img) {
    ASSERT_EQ(model.labels.rows(), img.height());
    ASSERT_EQ(model.labels.cols(), img.width());
    ASSERT_EQ(static_cast<int>(model.centers.size()), model.k);
    for (double c : model.centers) {
        ASSERT_TRUE(std::isfinite(c));
        ASSERT_GE(c, 0.0);
        ASSERT_LE(c, 1.0);
    }
    for (std::size_t i = 0; i < img.size(); ++i) {
        const int label = model.labels.values()[i];
        ASSERT_GE(label, 0);
        ASSERT_LT(label, model.k);
        const double x = img.values()[i];
        const double own = std::abs(x - model.centers[label]);
        for (double c : model.centers) ASSERT_LE(own, std::abs(x - c) + 1e-12) << "pixel " << i;
    }
}

void expect_centers_within_members(const ClusterModel& model, const GrayImage& img) {
    std::vector<double> lo(model.k, 2.0), hi(model.k, -1.0);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const int j = model.labels.values()[i];
        lo[j] = std::min(lo[j], img.values()[i]);
        hi[j] = std::max(hi[j], img.values()[i]);
    }
    for (int j = 0; j < model.k; ++j) {
        if (model.populations[j] == 0) continue;
        EXPECT_GE(model.centers[j], lo[j] - 1e-12);
        EXPECT_LE(model.centers[j], hi[j] + 1e-12);
    }
}

TEST(ClusterInit, EvenIntervals) {
    const ClusterInit init = make_cluster_init(0.2, 0.8, 4);
    EXPECT_NEAR(init.i_range, 0.6, 1e-12);
    EXPECT_NEAR(init.step_size, 0.15, 1e-12);
    const double bounds[5] = {0.2, 0.35, 0.5, 0.65, 0.8};
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(init.interval(i).first, bounds[i], 1e-12);
        EXPECT_NEAR(init.interval(i).second, bounds[i + 1], 1e-12);
        EXPECT_NEAR(init.initial_centers[i], 0.5 * (bounds[i] + bounds[i + 1]), 1e-12);
    }
}

TEST(ClusterOptimized, ConstantImageSingleCluster) {
    const ClusterModel m = cluster_optimized(GrayImage(5, 4, 0.42), 1);
    EXPECT_EQ(m.k, 1);
    EXPECT_NEAR(m.centers[0], 0.42, 1e-12);
    EXPECT_TRUE(m.converged);
    EXPECT_EQ(m.iterations, 1);
    for (int label : m.labels.values()) EXPECT_EQ(label, 0);
}

TEST(ClusterOptimized, ToyMultisetMatchesExhaustiveOracle) {
    const GrayImage img = row_image({0.2, 0.22, 0.58, 0.6});
    const ClusterModel m = cluster_optimized(img, 2);
    EXPECT_NEAR(m.centers[0], 0.21, 1e-12);
    EXPECT_NEAR(m.centers[1], 0.59, 1e-12);
    EXPECT_EQ(m.labels.values()[0], m.labels.values()[1]);
    EXPECT_EQ(m.labels.values()[2], m.labels.values()[3]);
    EXPECT_NE(m.labels.values()[0], m.labels.values()[2]);
    std::vector<double> values;
    std::vector<std::size_t> counts;
    distinct_with_counts(img, values, counts);
    EXPECT_TRUE(testing::is_oracle_fixed_point(m, img, values, testing::lloyd_fixed_points(values, counts, 2)));
}

TEST(ClusterOptimized, MoreClustersThanValuesLeavesEmptyClusters) {
    const GrayImage img = row_image({0.1, 0.1, 0.9});
    const ClusterModel m = cluster_optimized(img, 4);
    std::size_t empty = std::count(m.populations.begin(), m.populations.end(), std::size_t{0});
    EXPECT_EQ(empty, 2u);
    expect_nearest_center(m, img);
}

TEST(ClusterOptimized, Deterministic) {
    const GrayImage img = testing::random_image(40, 30, 9);
    const ClusterModel a = cluster_optimized(img, 5), b = cluster_optimized(img, 5);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.centers, b.centers);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(ClusterKMeans, ToyMultisetAnySeed) {
    const GrayImage img = row_image({0.2, 0.22, 0.58, 0.6});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ClusterModel m = cluster_kmeans(img, 2, seed);
        std::vector<double> centers = m.centers;
        std::sort(centers.begin(), centers.end());
        EXPECT_NEAR(centers[0], 0.21, 1e-12) << seed;
        EXPECT_NEAR(centers[1], 0.59, 1e-12) << seed;
    }
}

TEST(ClusterKMeans, SeedDeterminismAndSingleCluster) {
    const GrayImage img = testing::random_image(30, 20, 4);
    EXPECT_EQ(cluster_kmeans(img, 4, 77).labels, cluster_kmeans(img, 4, 77).labels);
    double mean = 0.0;
    for (double x : img.values()) mean += x;
    mean /= static_cast<double>(img.size());
    EXPECT_NEAR(cluster_kmeans(img, 1, 3).centers[0], mean, 1e-12);
}

TEST(ClusterKMeans, TooFewDistinctValues) {
    EXPECT_THROW(cluster_kmeans(row_image({0.1, 0.1, 0.5}), 3, 1), InvalidArgument);
    EXPECT_THROW(cluster_fcm(row_image({0.1, 0.1, 0.5}), 3, FcmOptions{}), InvalidArgument);
    EXPECT_THROW(cluster_kmeans(row_image({0.1}), 0, 1), InvalidArgument);
}

TEST(FuzzyMemberships, RowsSumToOneAndSingularity) {
    const std::vector<double> centers = {0.1, 0.45, 0.8};
    std::vector<double> row(3);
    for (int i = 0; i <= 100; ++i) {
        fuzzy_memberships(i / 100.0, centers, 2.0, row);
        EXPECT_NEAR(row[0] + row[1] + row[2], 1.0, 1e-9);
    }
    fuzzy_memberships(0.45, centers, 2.0, row);
    EXPECT_EQ(row, (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(ClusterFcm, TwoPopulations) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> jitter(0.0, 0.01);
    std::vector<double> xs;
    double sum_lo = 0.0, sum_hi = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double lo = std::clamp(0.2 + jitter(rng), 0.0, 1.0), hi = std::clamp(0.8 + jitter(rng), 0.0, 1.0);
        xs.push_back(lo);
        xs.push_back(hi);
        sum_lo += lo;
        sum_hi += hi;
    }
    const ClusterModel m = cluster_fcm(row_image(xs), 2, FcmOptions{});
    std::vector<double> centers = m.centers;
    std::sort(centers.begin(), centers.end());
    EXPECT_NEAR(centers[0], sum_lo / 200, 0.02);
    EXPECT_NEAR(centers[1], sum_hi / 200, 0.02);
    EXPECT_TRUE(m.converged);
}

TEST(ClusterFcm, Validation) {
    const GrayImage img = testing::random_image(4, 4, 1);
    EXPECT_THROW(cluster_fcm(img, 2, FcmOptions{1.0, 1e-4, 1, 100}), InvalidArgument);
    EXPECT_THROW(cluster_fcm(img, 2, FcmOptions{2.0, 0.0, 1, 100}), InvalidArgument);
}

// Between-class score of a threshold pair straight from the definition.
double otsu_score(const std::array<std::size_t, 256>& h, int t1, int t2) {
    double total = 0.0, mom = 0.0;
    for (int b = 0; b < 256; ++b) {
        total += static_cast<double>(h[b]);
        mom += b * static_cast<double>(h[b]);
    }
    const double mu = mom / total;
    double score = 0.0;
    const int lo[3] = {0, t1 + 1, t2 + 1}, hi[3] = {t1, t2, 255};
    for (int c = 0; c < 3; ++c) {
        double n = 0.0, m = 0.0;
        for (int b = lo[c]; b <= hi[c]; ++b) {
            n += static_cast<double>(h[b]);
            m += b * static_cast<double>(h[b]);
        }
        if (n > 0.0) score += n / total * (m / n - mu) * (m / n - mu);
    }
    return score;
}

void expect_otsu_optimal(const GrayImage& img) {
    std::array<std::size_t, 256> h{};
    for (double x : img.values()) ++h[to_byte(x)];
    double best = -1.0;
    for (int t1 = 0; t1 < 256; ++t1)
        for (int t2 = t1; t2 < 256; ++t2) best = std::max(best, otsu_score(h, t1, t2));
    const OtsuThresholds t = otsu_double_thresholds(h);
    EXPECT_LE(t.t1, t.t2);
    EXPECT_NEAR(otsu_score(h, t.t1, t.t2), best, 1e-9 * best);
    EXPECT_NEAR(t.between_variance / (255.0 * 255.0), best / (255.0 * 255.0), 1e-9);
}

TEST(OtsuDouble, MatchesBruteForceOnRandomHistograms) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        expect_otsu_optimal(testing::random_byte_image(24, 24, seed));
        expect_otsu_optimal(testing::random_byte_image(24, 24, seed + 100, 60, 90));
    }
}

TEST(OtsuDouble, TrimodalThresholdsFallBetweenModes) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> jitter(0.0, 0.02);
    std::vector<double> xs;
    for (double mode : {0.1, 0.5, 0.9})
        for (int i = 0; i < 300; ++i) xs.push_back(std::clamp(mode + jitter(rng), 0.0, 1.0));
    const GrayImage img = row_image(xs);
    expect_otsu_optimal(img);
    std::array<std::size_t, 256> h{};
    for (double x : xs) ++h[to_byte(x)];
    const OtsuThresholds t = otsu_double_thresholds(h);
    EXPECT_GT(t.t1, to_byte(0.1));
    EXPECT_LT(t.t1, to_byte(0.5));
    EXPECT_GT(t.t2, to_byte(0.5));
    EXPECT_LT(t.t2, to_byte(0.9));
    const ClusterModel m = threshold_otsu_double(img);
    EXPECT_EQ(m.k, 3);
    EXPECT_NEAR(m.centers[0], 0.1, 0.01);
    EXPECT_NEAR(m.centers[1], 0.5, 0.01);
    EXPECT_NEAR(m.centers[2], 0.9, 0.01);
}

TEST(OtsuDouble, TwoValuesOneThresholdSeparates) {
    const GrayImage img = row_image({0.2, 0.2, 0.8, 0.8, 0.8});
    expect_otsu_optimal(img);
    const ClusterModel m = threshold_otsu_double(img);
    EXPECT_EQ(std::count(m.populations.begin(), m.populations.end(), std::size_t{0}), 1);
    EXPECT_NE(m.labels.values()[0], m.labels.values()[2]);
    EXPECT_EQ(m.labels.values()[0], m.labels.values()[1]);
    EXPECT_EQ(m.labels.values()[2], m.labels.values()[4]);
    expect_nearest_center(m, img);
}

TEST(OtsuDouble, ConstantImageRejected) {
    EXPECT_THROW(threshold_otsu_double(GrayImage(3, 3, 0.5)), InvalidArgument);
}

TEST(AllClusterers, NearestCenterAndMemberBounds) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const GrayImage img = testing::random_byte_image(20, 15, seed);
        for (ClusterAlgo algo : {ClusterAlgo::Optimized, ClusterAlgo::KMeans, ClusterAlgo::Fcm, ClusterAlgo::Otsu}) {
            SCOPED_TRACE(std::string(to_string(algo)) + " seed " + std::to_string(seed));
            ClusterRunOptions options;
            options.seed = seed;
            const ClusterModel m = run_clusterer(algo, img, 4, options);
            expect_nearest_center(m, img);
            expect_centers_within_members(m, img);
        }
    }
}

TEST(LloydFixedPoints, OptimizedAndKMeansOnSmallMultisets) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 8);
        std::vector<double> pool;
        for (int i = 0; i < d; ++i) pool.push_back(static_cast<double>(rng() % 256) / 255.0);
        std::vector<double> xs;
        for (int i = 0; i < 24; ++i) xs.push_back(pool[rng() % pool.size()]);
        const GrayImage img = row_image(xs);
        std::vector<double> values;
        std::vector<std::size_t> counts;
        distinct_with_counts(img, values, counts);
        const int k = 1 + static_cast<int>(rng() % std::min<std::size_t>(3, values.size()));
        const auto oracle = testing::lloyd_fixed_points(values, counts, k);
        EXPECT_TRUE(testing::is_oracle_fixed_point(cluster_optimized(img, k), img, values, oracle)) << trial;
        EXPECT_TRUE(testing::is_oracle_fixed_point(cluster_kmeans(img, k, trial), img, values, oracle)) << trial;
    }
}

TEST(Localize, DarkestClusterOnly) {
    const GrayImage img = row_image({0.3, 0.7, 0.3, 0.7});
    ClusterModel m;
    m.k = 2;
    m.centers = {0.7, 0.3};
    m.labels = Grid<int>(1, 4, std::vector<int>{1, 0, 1, 0});
    m.populations = {2, 2};
    const BinaryMask mask = localize(img, m);
    EXPECT_EQ(mask, BinaryMask(Grid<std::uint8_t>(1, 4, std::vector<std::uint8_t>{1, 0, 1, 0})));
    const ClusterModel single = cluster_optimized(img, 1);
    EXPECT_EQ(localize(img, single).count(), img.size());
}

TEST(Localize, IgnoresEmptyDarkClusters) {
    ClusterModel m;
    m.k = 3;
    m.centers = {0.05, 0.4, 0.9};
    m.labels = Grid<int>(1, 2, std::vector<int>{1, 2});
    m.populations = {0, 1, 1};
    EXPECT_EQ(darkest_cluster(m), 1);
}

TEST(Localize, PhantomVeinsFound) {
    const Phantom ph = gen_phantom(PhantomSpec{});
    const QuantizedImage q = preprocess(ph.image, PreprocessParams{}).quantized;
    const ClusterModel m = cluster_optimized(q.image, 5);
    const BinaryMask mask = localize(q.image, m);
    EXPECT_GE(metrics(confusion(mask, ph.truth)).dice, 0.6);
}

TEST(ClusterAlgo, NamesRoundTrip) {
    for (ClusterAlgo algo : {ClusterAlgo::Optimized, ClusterAlgo::KMeans, ClusterAlgo::Fcm, ClusterAlgo::Otsu}) {
        EXPECT_EQ(parse_cluster_algo(to_string(algo)), algo);
    }
    EXPECT_THROW(parse_cluster_algo("dbscan"), InvalidArgument);
}

TEST(LabelImage, SpreadsLabelsOverUnitRange) {
    const ClusterModel m = cluster_optimized(row_image({0.1, 0.5, 0.9}), 3);
    const GrayImage g = label_image(m);
    EXPECT_EQ(g(0, 0), 0.0);
    EXPECT_EQ(g(0, 1), 0.5);
    EXPECT_EQ(g(0, 2), 1.0);
}

}  // namespace
}  // namespace veinx
