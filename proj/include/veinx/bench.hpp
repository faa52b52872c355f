#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veinx/clustering.hpp"
#include "veinx/image.hpp"

namespace veinx {

struct TimingEntry {
    ClusterAlgo algo = ClusterAlgo::Optimized;
    double mean_seconds = 0.0;
    double stddev_seconds = 0.0;
    int iterations = 0;          ///< of the last repetition
    std::uint64_t label_digest = 0;  ///< FNV-1a of the last repetition's labels
};

struct TimingReport {
    int width = 0;
    int height = 0;
    int k = 0;
    int repetitions = 0;
    std::uint64_t master_seed = 0;
    std::vector<TimingEntry> entries;

    const TimingEntry& entry(ClusterAlgo algo) const;
};

struct BenchOptions {
    int reps = 5;
    std::uint64_t master_seed = 42;
    ClusterRunOptions cluster;
};

std::uint64_t label_digest(const Grid<int>& labels);

/// Times each clusterer `reps` times on `img` after one discarded warm-up
/// run. k-means and FCM draw a fresh seed per repetition from the master seed.
TimingReport bench_clustering(const GrayImage& img, int k, const BenchOptions& options);

}  // namespace veinx
