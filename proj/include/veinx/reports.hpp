#pragma once

#include <string>

#include <json.hpp>

#include "veinx/bench.hpp"
#include "veinx/clustering.hpp"
#include "veinx/gpo.hpp"
#include "veinx/metrics.hpp"

namespace veinx {

nlohmann::json to_json(const ConfusionCounts& c, const MetricReport& m);
nlohmann::json to_json(const QualityReport& q);
nlohmann::json to_json(const TimingReport& t);

/// Flat two-line CSV (header + values) with the same fields as the JSON.
std::string to_csv(const ConfusionCounts& c, const MetricReport& m);
std::string to_csv(const QualityReport& q);
/// One row per algorithm.
std::string to_csv(const TimingReport& t);

/// cluster,center,population (1-based cluster numbers).
std::string cluster_csv(const ClusterModel& model);

/// block_row,block_col,angle,coherence,freq,valid
std::string field_csv(const OrientationField& field, const FrequencyMap& freq);

}  // namespace veinx
