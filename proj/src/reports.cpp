#include "veinx/reports.hpp"

#include <cstdio>
#include <sstream>

namespace veinx {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

nlohmann::json to_json(const ConfusionCounts& c, const MetricReport& m) {
    return {
        {"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn},
        {"accuracy", m.accuracy}, {"tp_over_correct", m.tp_over_correct},
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"dice", m.dice},
        {"degenerate", m.degenerate},
    };
}

nlohmann::json to_json(const QualityReport& q) {
    nlohmann::json j = {{"mse", q.mse}, {"psnr_infinite", q.psnr_infinite}, {"snr_degenerate", q.snr_degenerate}};
    j["psnr"] = q.psnr_infinite ? nlohmann::json(nullptr) : nlohmann::json(q.psnr);
    j["snr"] = q.snr_degenerate ? nlohmann::json(nullptr) : nlohmann::json(q.snr);
    return j;
}

nlohmann::json to_json(const TimingReport& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : t.entries) {
        rows.push_back({{"algorithm", std::string(to_string(e.algo))},
                        {"mean_seconds", e.mean_seconds},
                        {"stddev_seconds", e.stddev_seconds},
                        {"iterations", e.iterations},
                        {"label_digest", e.label_digest}});
    }
    nlohmann::json reference = nlohmann::json::object();
    for (const auto& row : reference::kClusteringSeconds) {
        reference[row.name] = row.seconds;
    }
    return {{"width", t.width}, {"height", t.height}, {"k", t.k}, {"repetitions", t.repetitions},
            {"master_seed", t.master_seed}, {"algorithms", rows}, {"reference_seconds", reference}};
}

std::string to_csv(const ConfusionCounts& c, const MetricReport& m) {
    std::ostringstream out;
    out << "tp,tn,fp,fn,accuracy,tp_over_correct,precision,recall,f1,dice,degenerate\n";
    out << c.tp << ',' << c.tn << ',' << c.fp << ',' << c.fn << ',' << num(m.accuracy) << ','
        << num(m.tp_over_correct) << ',' << num(m.precision) << ',' << num(m.recall) << ',' << num(m.f1)
        << ',' << num(m.dice) << ',' << (m.degenerate ? "true" : "false") << '\n';
    return out.str();
}

std::string to_csv(const QualityReport& q) {
    std::ostringstream out;
    out << "mse,psnr,psnr_infinite,snr,snr_degenerate\n";
    out << num(q.mse) << ',' << (q.psnr_infinite ? "inf" : num(q.psnr)) << ','
        << (q.psnr_infinite ? "true" : "false") << ',' << (q.snr_degenerate ? "nan" : num(q.snr)) << ','
        << (q.snr_degenerate ? "true" : "false") << '\n';
    return out.str();
}

std::string to_csv(const TimingReport& t) {
    std::ostringstream out;
    out << "algorithm,mean_seconds,stddev_seconds,iterations,label_digest,width,height,k,repetitions\n";
    for (const auto& e : t.entries) {
        out << to_string(e.algo) << ',' << num(e.mean_seconds) << ',' << num(e.stddev_seconds) << ','
            << e.iterations << ',' << e.label_digest << ',' << t.width << ',' << t.height << ',' << t.k << ','
            << t.repetitions << '\n';
    }
    return out.str();
}

std::string cluster_csv(const ClusterModel& model) {
    std::ostringstream out;
    out << "cluster,center,population\n";
    for (int j = 0; j < model.k; ++j) {
        out << (j + 1) << ',' << num(model.centers[j]) << ',' << model.populations[j] << '\n';
    }
    return out.str();
}

std::string field_csv(const OrientationField& field, const FrequencyMap& freq) {
    std::ostringstream out;
    out << "block_row,block_col,angle,coherence,freq,valid\n";
    for (int r = 0; r < field.block_rows(); ++r) {
        for (int c = 0; c < field.block_cols(); ++c) {
            out << r << ',' << c << ',' << num(field.angles(r, c)) << ',' << num(field.coherence(r, c)) << ','
                << num(freq.freqs(r, c)) << ',' << static_cast<int>(freq.valid(r, c)) << '\n';
        }
    }
    return out.str();
}

}  // namespace veinx
