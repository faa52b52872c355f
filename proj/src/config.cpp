#include "veinx/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "veinx/image_io.hpp"

namespace veinx {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
        // from_chars for double is incomplete on some standard libraries
        try {
            std::size_t used = 0;
            value = static_cast<T>(std::stod(s, &used));
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
        } catch (const std::exception&) {
            throw ConfigError(std::string(key), "not a number: '" + s + "'");
        }
    } else {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError(std::string(key), "not an integer: '" + s + "'");
        }
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(std::string(key), "not a boolean: '" + s + "'");
}

template <typename T>
std::string format_value(T v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

struct Entry {
    std::string name;
    std::function<void(PipelineConfig&, std::string_view)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define VEINX_ENTRY(KEY, FIELD, TYPE)                                                                        \
    Entry {                                                                                                  \
        KEY, [](PipelineConfig& c, std::string_view v) { c.FIELD = parse_number<TYPE>(KEY, v); },           \
            [](const PipelineConfig& c) { return format_value(c.FIELD); }                                    \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        Entry{"preprocess", [](PipelineConfig& c, std::string_view v) { c.extract.preprocess = parse_bool("preprocess", v); },
              [](const PipelineConfig& c) { return std::string(c.extract.preprocess ? "true" : "false"); }},
        VEINX_ENTRY("normalize_window", extract.pre.normalize_window, int),
        VEINX_ENTRY("target_mean", extract.pre.target_mean, double),
        VEINX_ENTRY("target_var", extract.pre.target_var, double),
        VEINX_ENTRY("wiener_window", extract.pre.wiener_window, int),
        Entry{"auto_input_range",
              [](PipelineConfig& c, std::string_view v) { c.extract.pre.auto_input_range = parse_bool("auto_input_range", v); },
              [](const PipelineConfig& c) { return std::string(c.extract.pre.auto_input_range ? "true" : "false"); }},
        VEINX_ENTRY("l_in", extract.pre.adjust.l_in, double),
        VEINX_ENTRY("h_in", extract.pre.adjust.h_in, double),
        VEINX_ENTRY("l_out", extract.pre.adjust.l_out, double),
        VEINX_ENTRY("h_out", extract.pre.adjust.h_out, double),
        VEINX_ENTRY("step", extract.pre.adjust.step, double),
        Entry{"algo", [](PipelineConfig& c, std::string_view v) {
                  try {
                      c.extract.algo = parse_cluster_algo(trim(v));
                  } catch (const InvalidArgument& e) {
                      throw ConfigError("algo", e.what());
                  }
              },
              [](const PipelineConfig& c) { return std::string(to_string(c.extract.algo)); }},
        VEINX_ENTRY("k", extract.k_override, int),
        VEINX_ENTRY("max_iter", extract.cluster.max_iter, int),
        VEINX_ENTRY("seed", extract.cluster.seed, std::uint64_t),
        VEINX_ENTRY("fcm_m", extract.cluster.fcm_m, double),
        VEINX_ENTRY("fcm_eps", extract.cluster.fcm_eps, double),
        VEINX_ENTRY("localize_margin", extract.localize_margin, int),
        VEINX_ENTRY("sigma", extract.sigma, double),
        VEINX_ENTRY("kernel_size", extract.kernel_size, int),
        VEINX_ENTRY("percentile", extract.percentile, double),
        VEINX_ENTRY("block_size", extract.block_size, int),
        VEINX_ENTRY("freq_window", freq_window, int),
        VEINX_ENTRY("se_length", extract.se_length, int),
        VEINX_ENTRY("min_area", extract.min_area, int),
        VEINX_ENTRY("reps", reps, int),
        VEINX_ENTRY("master_seed", master_seed, std::uint64_t),
        Entry{"bench_preprocess",
              [](PipelineConfig& c, std::string_view v) { c.bench_preprocess = parse_bool("bench_preprocess", v); },
              [](const PipelineConfig& c) { return std::string(c.bench_preprocess ? "true" : "false"); }},
    };
    return table;
}

#undef VEINX_ENTRY

const Entry& find_entry(std::string_view key) {
    for (const auto& e : entries()) {
        if (e.name == key) {
            return e;
        }
    }
    throw ConfigError(std::string(key), "unknown config key");
}

void require(bool ok, const char* key, const std::string& message) {
    if (!ok) {
        throw ConfigError(key, message);
    }
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& e : entries()) out.push_back(e.name);
        return out;
    }();
    return keys;
}

void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value) {
    find_entry(key).set(config, value);
}

std::string get_config_value(const PipelineConfig& config, std::string_view key) {
    return find_entry(key).get(config);
}

void apply_config_text(PipelineConfig& config, std::string_view text, const std::string& origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string content = trim(line);
        if (content.empty()) {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(content, origin + ":" + std::to_string(number) + ": expected key = value");
        }
        set_config_value(config, trim(std::string_view(content).substr(0, eq)),
                         trim(std::string_view(content).substr(eq + 1)));
    }
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileNotFound("cannot read config file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    apply_config_text(config, buffer.str(), path.string());
}

void validate_config(const PipelineConfig& config) {
    const ExtractParams& e = config.extract;
    const PreprocessParams& p = e.pre;
    require(p.normalize_window >= 3 && p.normalize_window % 2 == 1, "normalize_window", "must be odd and >= 3");
    require(p.target_mean >= 0.0 && p.target_mean <= 1.0, "target_mean", "must lie in [0,1]");
    require(p.target_var > 0.0, "target_var", "must be > 0");
    require(p.wiener_window >= 3 && p.wiener_window % 2 == 1, "wiener_window", "must be odd and >= 3");
    const auto& a = p.adjust;
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(unit(a.l_in), "l_in", "must lie in [0,1]");
    require(unit(a.h_in) && a.h_in > a.l_in, "h_in", "must lie in [0,1] and exceed l_in");
    require(unit(a.l_out), "l_out", "must lie in [0,1]");
    require(unit(a.h_out) && a.h_out > a.l_out, "h_out", "must lie in [0,1] and exceed l_out");
    require(a.step > 0.0 && a.step <= a.h_out - a.l_out + 1e-12, "step", "must lie in (0, h_out - l_out]");
    require(e.k_override >= 0, "k", "must be >= 0 (0 = level count)");
    require(e.cluster.max_iter >= 1, "max_iter", "must be >= 1");
    require(e.cluster.fcm_m > 1.0, "fcm_m", "must be > 1");
    require(e.cluster.fcm_eps > 0.0, "fcm_eps", "must be > 0");
    require(e.localize_margin >= 0, "localize_margin", "must be >= 0");
    require(e.sigma > 0.0, "sigma", "must be > 0");
    require(e.kernel_size == 0 || (e.kernel_size >= 3 && e.kernel_size % 2 == 1), "kernel_size",
            "must be 0 (auto) or odd >= 3");
    require(e.percentile > 0.0 && e.percentile <= 100.0, "percentile", "must lie in (0, 100]");
    require(e.block_size >= 4, "block_size", "must be >= 4");
    require(config.freq_window >= 2 * e.block_size, "freq_window", "must be >= 2 * block_size");
    require(e.se_length >= 1, "se_length", "must be >= 1");
    require(e.min_area >= 0, "min_area", "must be >= 0");
    require(config.reps >= 3, "reps", "must be >= 3");
}

std::string dump_config(const PipelineConfig& config) {
    std::string out;
    for (const auto& e : entries()) {
        out += e.name + " = " + e.get(config) + "\n";
    }
    return out;
}

}  // namespace veinx
