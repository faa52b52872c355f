#include "veinx/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace veinx {

const TimingEntry& TimingReport::entry(ClusterAlgo algo) const {
    for (const auto& e : entries) {
        if (e.algo == algo) {
            return e;
        }
    }
    throw InvalidArgument("no timing entry for " + std::string(to_string(algo)));
}

std::uint64_t label_digest(const Grid<int>& labels) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (int label : labels.values()) {
        auto v = static_cast<std::uint32_t>(label);
        for (int b = 0; b < 4; ++b) {
            hash ^= (v >> (8 * b)) & 0xffU;
            hash *= 1099511628211ULL;
        }
    }
    return hash;
}

TimingReport bench_clustering(const GrayImage& img, int k, const BenchOptions& options) {
    if (options.reps < 3) {
        throw InvalidArgument("benchmark needs at least 3 repetitions");
    }
    TimingReport report;
    report.width = img.width();
    report.height = img.height();
    report.k = k;
    report.repetitions = options.reps;
    report.master_seed = options.master_seed;

    std::mt19937_64 seeds(options.master_seed);
    for (auto algo : {ClusterAlgo::Optimized, ClusterAlgo::KMeans, ClusterAlgo::Fcm, ClusterAlgo::Otsu}) {
        ClusterRunOptions run = options.cluster;
        run.seed = seeds();
        (void)run_clusterer(algo, img, k, run);  // warm-up

        std::vector<double> times;
        TimingEntry entry;
        entry.algo = algo;
        for (int rep = 0; rep < options.reps; ++rep) {
            run.seed = seeds();
            const auto start = std::chrono::steady_clock::now();
            const ClusterModel model = run_clusterer(algo, img, k, run);
            times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
            entry.iterations = model.iterations;
            entry.label_digest = label_digest(model.labels);
        }
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= static_cast<double>(times.size());
        double var = 0.0;
        for (double t : times) var += (t - mean) * (t - mean);
        entry.mean_seconds = mean;
        entry.stddev_seconds = std::sqrt(var / static_cast<double>(times.size()));
        report.entries.push_back(entry);
    }
    return report;
}

}  // namespace veinx
