#pragma once

#include <filesystem>
#include <optional>

#include "veinx/config.hpp"
#include "veinx/synth.hpp"

namespace veinx::cli {

namespace fs = std::filesystem;

int cmd_preprocess(const fs::path& in, const fs::path& out, const PipelineConfig& config, bool dump_stages);
int cmd_cluster(const fs::path& in, const fs::path& out, const PipelineConfig& config);
int cmd_extract(const fs::path& in, const fs::path& out, const PipelineConfig& config,
                const std::optional<fs::path>& debug_dir);
int cmd_eval(const fs::path& pred, const fs::path& truth, const fs::path& out_stem, bool with_quality);
int cmd_bench(const fs::path& in, const fs::path& out_stem, const PipelineConfig& config);
int cmd_synth(const PhantomSpec& spec, const fs::path& out_stem);

}  // namespace veinx::cli
