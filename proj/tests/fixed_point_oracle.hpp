#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "veinx/clustering.hpp"

namespace veinx::testing {

/// One Lloyd fixed point of a weighted 1-D multiset: a partition of the
/// distinct values plus the block means.
struct FixedPoint {
    std::vector<int> block_of;  ///< per distinct value, canonical block numbering
    std::vector<double> means;
};

/// Enumerates every partition of the distinct values into at most k
/// non-empty blocks (restricted growth strings) and keeps those where each
/// value is no farther from its own block mean than from any other.
inline std::vector<FixedPoint> lloyd_fixed_points(const std::vector<double>& values,
                                                  const std::vector<std::size_t>& counts, int k) {
    const int d = static_cast<int>(values.size());
    std::vector<FixedPoint> found;
    std::vector<int> rgs(d, 0);
    while (true) {
        int blocks = 0;
        for (int v : rgs) blocks = std::max(blocks, v + 1);
        if (blocks <= k) {
            std::vector<double> sum(blocks, 0.0), n(blocks, 0.0);
            for (int i = 0; i < d; ++i) {
                sum[rgs[i]] += values[i] * static_cast<double>(counts[i]);
                n[rgs[i]] += static_cast<double>(counts[i]);
            }
            std::vector<double> means(blocks);
            for (int b = 0; b < blocks; ++b) means[b] = sum[b] / n[b];
            bool stable = true;
            for (int i = 0; i < d && stable; ++i) {
                const double own = std::abs(values[i] - means[rgs[i]]);
                for (int b = 0; b < blocks; ++b) {
                    if (std::abs(values[i] - means[b]) < own - 1e-12) {
                        stable = false;
                        break;
                    }
                }
            }
            if (stable) found.push_back({rgs, means});
        }
        // Next restricted growth string.
        int i = d - 1;
        while (i > 0) {
            int prefix_max = 0;
            for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
            if (rgs[i] <= prefix_max && rgs[i] + 1 < k) {
                ++rgs[i];
                for (int j = i + 1; j < d; ++j) rgs[j] = 0;
                break;
            }
            --i;
        }
        if (i <= 0) break;
    }
    return found;
}

/// True when the model's non-empty clusters form one of the oracle's fixed
/// points (same blocks, centers equal to the block means within `tol`).
inline bool is_oracle_fixed_point(const ClusterModel& model, const GrayImage& img, const std::vector<double>& values,
                                  const std::vector<FixedPoint>& oracle, double tol = 1e-12) {
    // Cluster of each distinct value, renumbered canonically by first appearance.
    std::vector<int> cluster_of(values.size(), -1);
    for (std::size_t p = 0; p < img.size(); ++p) {
        const double x = img.values()[p];
        for (std::size_t v = 0; v < values.size(); ++v) {
            if (values[v] == x) {
                const int c = model.labels.values()[p];
                if (cluster_of[v] >= 0 && cluster_of[v] != c) return false;  // one value split across clusters
                cluster_of[v] = c;
            }
        }
    }
    std::vector<int> canon(model.k, -1);
    std::vector<int> blocks(values.size());
    std::vector<int> cluster_of_block;
    for (std::size_t v = 0; v < values.size(); ++v) {
        int& slot = canon[cluster_of[v]];
        if (slot < 0) {
            slot = static_cast<int>(cluster_of_block.size());
            cluster_of_block.push_back(cluster_of[v]);
        }
        blocks[v] = slot;
    }
    for (const FixedPoint& fp : oracle) {
        if (fp.block_of != blocks) continue;
        for (std::size_t b = 0; b < fp.means.size(); ++b) {
            if (std::abs(model.centers[cluster_of_block[b]] - fp.means[b]) > tol) return false;
        }
        return true;
    }
    return false;
}

}  // namespace veinx::testing
