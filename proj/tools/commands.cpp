#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <vector>

#include "veinx/bench.hpp"
#include "veinx/image_io.hpp"
#include "veinx/metrics.hpp"
#include "veinx/reports.hpp"

namespace veinx::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
    return stem.parent_path() / (stem.filename().string() + suffix);
}

bool is_image_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".pgm" || ext == ".png" || ext == ".PGM" || ext == ".PNG";
}

void ensure_parent(const fs::path& out) {
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
}

// Runs `one` on a single file, or on every image under a directory with the
// output tree mirroring the input tree.
int for_each_input(const fs::path& in, const fs::path& out,
                   const std::function<void(const fs::path&, const fs::path&)>& one) {
    try {
        if (!fs::is_directory(in)) {
            ensure_parent(out);
            one(in, out);
            return 0;
        }
        std::vector<fs::path> inputs;
        for (const auto& entry : fs::recursive_directory_iterator(in)) {
            if (entry.is_regular_file() && is_image_file(entry.path())) {
                inputs.push_back(entry.path());
            }
        }
        std::sort(inputs.begin(), inputs.end());
        for (const auto& file : inputs) {
            fs::path target = out / fs::relative(file, in);
            target.replace_extension(".pgm");
            ensure_parent(target);
            one(file, target);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

fs::path stage_path(const fs::path& out, const std::string& stage) {
    return out.parent_path() / (out.stem().string() + "_" + stage + ".pgm");
}

}  // namespace

int cmd_preprocess(const fs::path& in, const fs::path& out, const PipelineConfig& config, bool dump_stages) {
    return for_each_input(in, out, [&](const fs::path& src, const fs::path& dst) {
        const PreprocessStages stages = preprocess(load_image(src), config.extract.pre);
        save_image(stages.adjusted, dst);
        if (dump_stages) {
            save_image(stages.normalized, stage_path(dst, "normalized"));
            save_image(stages.denoised, stage_path(dst, "denoised"));
            save_image(stages.adjusted, stage_path(dst, "adjusted"));
            save_image(stages.quantized.image, stage_path(dst, "quantized"));
        }
    });
}

int cmd_cluster(const fs::path& in, const fs::path& out, const PipelineConfig& config) {
    return for_each_input(in, out, [&](const fs::path& src, const fs::path& dst) {
        GrayImage img = load_image(src);
        int k = config.extract.k_override;
        if (config.extract.preprocess) {
            QuantizedImage q = preprocess(img, config.extract.pre).quantized;
            img = q.image;
            if (k == 0) k = std::max(1, std::min(q.k, q.levels_present()));
        } else if (k == 0) {
            k = config.extract.pre.adjust.level_count();
        }
        const ClusterModel model = run_clusterer(config.extract.algo, img, k, config.extract.cluster);
        save_image(label_image(model), dst);
        write_text(dst.parent_path() / (dst.stem().string() + ".csv"), cluster_csv(model));
        save_mask(localize(img, model), stage_path(dst, "localized"));
    });
}

int cmd_extract(const fs::path& in, const fs::path& out, const PipelineConfig& config,
                const std::optional<fs::path>& debug_dir) {
    return for_each_input(in, out, [&](const fs::path& src, const fs::path& dst) {
        const ExtractionTrace trace = extract_pattern_traced(load_image(src), config.extract);
        save_mask(trace.mask, dst);
        if (debug_dir) {
            fs::create_directories(*debug_dir);
            const std::string stem = dst.stem().string();
            save_image(trace.filtered, *debug_dir / (stem + "_filtered.pgm"));
            double peak = 0.0;
            for (double s : trace.score.scores.values()) peak = std::max(peak, s);
            Grid<double> scaled = trace.score.scores;
            for (double& s : scaled.values()) s = peak > 0.0 ? s / peak : 0.0;
            save_image(GrayImage::from_clamped(std::move(scaled)), *debug_dir / (stem + "_score.pgm"));
            save_mask(trace.localized, *debug_dir / (stem + "_localized.pgm"));
            save_mask(trace.binarized, *debug_dir / (stem + "_preclose.pgm"));
            const FrequencyMap freq =
                estimate_frequency(trace.filtered, trace.field, config.extract.block_size, config.freq_window);
            write_text(*debug_dir / (stem + "_field.csv"), field_csv(trace.field, freq));
        }
    });
}

int cmd_eval(const fs::path& pred, const fs::path& truth, const fs::path& out_stem, bool with_quality) {
    return guarded([&] {
        const BinaryMask p = load_mask(pred);
        const BinaryMask t = load_mask(truth);
        const ConfusionCounts counts = confusion(p, t);
        const MetricReport report = metrics(counts);
        nlohmann::json j = {{"metrics", to_json(counts, report)}};
        std::string csv = to_csv(counts, report);
        std::optional<QualityReport> q;
        if (with_quality) {
            q = quality(load_image(pred), load_image(truth));
            j["quality"] = to_json(*q);
        }
        ensure_parent(out_stem);
        write_text(with_suffix(out_stem, ".json"), j.dump(2) + "\n");
        write_text(with_suffix(out_stem, ".csv"), csv);
        if (q) {
            write_text(with_suffix(out_stem, "_quality.csv"), to_csv(*q));
        }
    });
}

int cmd_bench(const fs::path& in, const fs::path& out_stem, const PipelineConfig& config) {
    return guarded([&] {
        GrayImage img = load_image(in);
        int k = config.extract.k_override;
        if (config.bench_preprocess) {
            QuantizedImage q = preprocess(img, config.extract.pre).quantized;
            img = q.image;
            if (k == 0) k = std::max(1, std::min(q.k, q.levels_present()));
        } else if (k == 0) {
            k = config.extract.pre.adjust.level_count();
        }
        BenchOptions options;
        options.reps = config.reps;
        options.master_seed = config.master_seed;
        options.cluster = config.extract.cluster;
        const TimingReport report = bench_clustering(img, k, options);
        ensure_parent(out_stem);
        write_text(with_suffix(out_stem, ".json"), to_json(report).dump(2) + "\n");
        write_text(with_suffix(out_stem, ".csv"), to_csv(report));
    });
}

int cmd_synth(const PhantomSpec& spec, const fs::path& out_stem) {
    return guarded([&] {
        const Phantom phantom = gen_phantom(spec);
        ensure_parent(out_stem);
        save_image(phantom.image, with_suffix(out_stem, ".pgm"));
        save_mask(phantom.truth, with_suffix(out_stem, "_truth.pgm"));
    });
}

}  // namespace veinx::cli
