#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>

#include "commands.hpp"

namespace {

using veinx::PipelineConfig;

// Flags > config file (--config, else $VEIN_CONFIG) > defaults.
struct ConfigOptions {
    std::string config_file;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* sub) {
        sub->add_option("--config", config_file, "key = value parameter file (default: $VEIN_CONFIG)");
        for (const auto& key : veinx::config_keys()) {
            sub->add_option("--" + key, overrides[key], "override config key '" + key + "'")->group("Parameters");
        }
    }

    PipelineConfig resolve(CLI::App* sub) const {
        PipelineConfig config;
        std::string file = config_file;
        if (file.empty()) {
            if (const char* env = std::getenv("VEIN_CONFIG")) file = env;
        }
        if (!file.empty()) {
            veinx::apply_config_file(config, file);
        }
        for (const auto& [key, value] : overrides) {
            if (sub->count("--" + key) > 0) {
                veinx::set_config_value(config, key, value);
            }
        }
        veinx::validate_config(config);
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finger-vein pattern extraction and clustering benchmark"};
    app.require_subcommand(1);

    std::string in, out, truth;
    bool dump_stages = false, with_quality = false;
    std::string debug_dir;

    auto* pre = app.add_subcommand("preprocess", "normalize, denoise, stretch and quantize an image");
    ConfigOptions pre_cfg;
    pre->add_option("input", in, "image file or directory")->required();
    pre->add_option("output", out, "output PGM (or directory)")->required();
    pre->add_flag("--dump-stages", dump_stages, "also write normalized/denoised/adjusted/quantized stages");
    pre_cfg.attach(pre);

    auto* cluster = app.add_subcommand("cluster", "cluster intensities and write label image + CSV");
    ConfigOptions cluster_cfg;
    cluster->add_option("input", in)->required();
    cluster->add_option("output", out)->required();
    cluster_cfg.attach(cluster);

    auto* extract = app.add_subcommand("extract", "extract the binary vein pattern");
    ConfigOptions extract_cfg;
    extract->add_option("input", in)->required();
    extract->add_option("output", out)->required();
    extract->add_option("--debug-dir", debug_dir, "write intermediate stages here");
    extract_cfg.attach(extract);

    auto* eval = app.add_subcommand("eval", "compare a predicted mask with ground truth");
    eval->add_option("pred", in)->required();
    eval->add_option("truth", truth)->required();
    eval->add_option("output", out, "report stem: writes <stem>.json and <stem>.csv")->required();
    eval->add_flag("--quality", with_quality, "also report MSE/PSNR/SNR treating both files as grayscale");

    auto* bench = app.add_subcommand("bench", "time the four clustering algorithms");
    ConfigOptions bench_cfg;
    bench->add_option("input", in)->required();
    bench->add_option("output", out, "report stem")->required();
    bench_cfg.attach(bench);

    auto* synth = app.add_subcommand("synth", "generate a phantom image and its truth mask");
    veinx::PhantomSpec spec;
    synth->add_option("output", out, "stem: writes <stem>.pgm and <stem>_truth.pgm")->required();
    synth->add_option("--seed", spec.seed);
    synth->add_option("--width", spec.width);
    synth->add_option("--height", spec.height);
    synth->add_option("--veins", spec.vein_count);
    synth->add_option("--vein-width-min", spec.vein_width_min);
    synth->add_option("--vein-width-max", spec.vein_width_max);
    synth->add_option("--background", spec.background_level);
    synth->add_option("--depth", spec.vein_depth);
    synth->add_option("--noise", spec.noise_sigma);
    synth->add_option("--blur", spec.blur_sigma);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*pre) return veinx::cli::cmd_preprocess(in, out, pre_cfg.resolve(pre), dump_stages);
        if (*cluster) return veinx::cli::cmd_cluster(in, out, cluster_cfg.resolve(cluster));
        if (*extract) {
            std::optional<std::filesystem::path> dbg;
            if (!debug_dir.empty()) dbg = debug_dir;
            return veinx::cli::cmd_extract(in, out, extract_cfg.resolve(extract), dbg);
        }
        if (*eval) return veinx::cli::cmd_eval(in, truth, out, with_quality);
        if (*bench) return veinx::cli::cmd_bench(in, out, bench_cfg.resolve(bench));
        if (*synth) return veinx::cli::cmd_synth(spec, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
