#include <gtest/gtest.h>

#include "support.hpp"
#include "veinx/config.hpp"
#include "veinx/image_io.hpp"

namespace veinx {
namespace {

TEST(Config, DefaultsAreValidAndDocumented) {
    const PipelineConfig c;
    EXPECT_NO_THROW(validate_config(c));
    EXPECT_EQ(get_config_value(c, "sigma"), "2.5");
    EXPECT_EQ(get_config_value(c, "percentile"), "85");
    EXPECT_EQ(get_config_value(c, "se_length"), "5");
    EXPECT_EQ(get_config_value(c, "min_area"), "30");
    EXPECT_EQ(get_config_value(c, "block_size"), "16");
    EXPECT_EQ(get_config_value(c, "freq_window"), "32");
    EXPECT_EQ(get_config_value(c, "algo"), "optimized");
}

TEST(Config, TextAppliesOverDefaults) {
    PipelineConfig c;
    apply_config_text(c, "# tuned run\nsigma = 3.0\n\n  algo=kmeans   # inline comment\npreprocess = false\n");
    EXPECT_EQ(c.extract.sigma, 3.0);
    EXPECT_EQ(c.extract.algo, ClusterAlgo::KMeans);
    EXPECT_FALSE(c.extract.preprocess);
    EXPECT_EQ(c.extract.percentile, 85.0);
}

TEST(Config, LaterSettingsWin) {
    PipelineConfig c;
    apply_config_text(c, "min_area = 10\n");
    set_config_value(c, "min_area", "12");
    EXPECT_EQ(c.extract.min_area, 12);
}

TEST(Config, FileRoundTripThroughDump) {
    PipelineConfig c;
    set_config_value(c, "percentile", "90.25");
    set_config_value(c, "seed", "123456789012");
    set_config_value(c, "auto_input_range", "false");
    testing::TempDir dir;
    const auto path = dir.path() / "run.cfg";
    testing::write_bytes(path, dump_config(c));
    PipelineConfig back;
    apply_config_file(back, path);
    EXPECT_EQ(dump_config(back), dump_config(c));
    EXPECT_EQ(back.extract.cluster.seed, 123456789012u);
    EXPECT_THROW(apply_config_file(back, dir.path() / "missing.cfg"), FileNotFound);
}

TEST(Config, EveryKeyIsReadable) {
    const PipelineConfig c;
    for (const auto& key : config_keys()) {
        PipelineConfig copy;
        EXPECT_NO_THROW(set_config_value(copy, key, get_config_value(c, key))) << key;
    }
}

TEST(Config, ParseErrorsNameTheKey) {
    PipelineConfig c;
    auto key_of = [&](const char* text) {
        try {
            apply_config_text(c, text);
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(key_of("sigma = wide\n"), "sigma");
    EXPECT_EQ(key_of("min_area = 3.5\n"), "min_area");
    EXPECT_EQ(key_of("preprocess = maybe\n"), "preprocess");
    EXPECT_EQ(key_of("algo = dbscan\n"), "algo");
    EXPECT_EQ(key_of("no_such_key = 1\n"), "no_such_key");
    EXPECT_THROW(apply_config_text(c, "sigma 2\n"), ConfigError);
}

TEST(Config, ValidationNamesOffendingKey) {
    auto key_of = [](const char* key, const char* value) {
        PipelineConfig c;
        set_config_value(c, key, value);
        try {
            validate_config(c);
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(key_of("normalize_window", "4"), "normalize_window");
    EXPECT_EQ(key_of("h_in", "0.0"), "h_in");
    EXPECT_EQ(key_of("step", "0"), "step");
    EXPECT_EQ(key_of("sigma", "-1"), "sigma");
    EXPECT_EQ(key_of("percentile", "0"), "percentile");
    EXPECT_EQ(key_of("kernel_size", "4"), "kernel_size");
    EXPECT_EQ(key_of("freq_window", "20"), "freq_window");
    EXPECT_EQ(key_of("reps", "2"), "reps");
    EXPECT_EQ(key_of("fcm_m", "1"), "fcm_m");
    EXPECT_EQ(key_of("k", "-1"), "k");
}

}  // namespace
}  // namespace veinx
