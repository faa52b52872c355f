#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "veinx/extraction.hpp"

namespace veinx {

/// A config key failed to parse or violates its owning stage's preconditions.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& message)
        : Error(key + ": " + message), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Every tunable of the pipeline, with stage defaults.
struct PipelineConfig {
    ExtractParams extract;
    int freq_window = 32;
    int reps = 5;
    std::uint64_t master_seed = 42;
    bool bench_preprocess = true;
};

/// Names of all config keys, in file order.
const std::vector<std::string>& config_keys();

void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const PipelineConfig& config, std::string_view key);

/// Applies `key = value` lines ('#' starts a comment) on top of `config`.
void apply_config_text(PipelineConfig& config, std::string_view text, const std::string& origin = "<text>");
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

/// Throws ConfigError naming the first offending key.
void validate_config(const PipelineConfig& config);

std::string dump_config(const PipelineConfig& config);

}  // namespace veinx
