#include "veinx/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace veinx {

namespace {

void check_same_size(int wa, int ha, int wb, int hb) {
    if (wa != wb || ha != hb) {
        throw InvalidArgument("dimension mismatch: " + std::to_string(wa) + "x" + std::to_string(ha) + " vs " +
                              std::to_string(wb) + "x" + std::to_string(hb));
    }
}

double ratio(std::size_t num, std::size_t den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double mse(const GrayImage& a, const GrayImage& b) {
    check_same_size(a.width(), a.height(), b.width(), b.height());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values()[i] - b.values()[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

Decibels psnr(const GrayImage& a, const GrayImage& b, double max_i) {
    if (!(max_i > 0.0)) {
        throw InvalidArgument("peak value must be positive");
    }
    const double err = mse(a, b);
    if (err == 0.0) {
        return {0.0, true};
    }
    return {10.0 * std::log10(max_i * max_i / err), false};
}

SnrResult snr(const GrayImage& a) {
    const double n = static_cast<double>(a.size());
    double mean = 0.0;
    for (double v : a.values()) {
        mean += v;
    }
    mean /= n;
    double var = 0.0;
    for (double v : a.values()) {
        var += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(var / n);
    // A constant image leaves only rounding residue of the mean in sd.
    const auto [lo, hi] = std::minmax_element(a.values().begin(), a.values().end());
    if (*lo == *hi || sd == 0.0 || mean <= 0.0) {
        return {0.0, true};
    }
    return {10.0 * std::log10(mean / sd), false};
}

QualityReport quality(const GrayImage& a, const GrayImage& b, double max_i) {
    QualityReport q;
    q.mse = mse(a, b);
    const Decibels p = psnr(a, b, max_i);
    q.psnr = p.value;
    q.psnr_infinite = p.infinite;
    const SnrResult s = snr(a);
    q.snr = s.value;
    q.snr_degenerate = s.degenerate;
    return q;
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& truth) {
    check_same_size(pred.width(), pred.height(), truth.width(), truth.height());
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.values()[i] != 0;
        const bool t = truth.values()[i] != 0;
        if (p && t) ++c.tp;
        else if (!p && !t) ++c.tn;
        else if (p) ++c.fp;
        else ++c.fn;
    }
    return c;
}

MetricReport metrics(const ConfusionCounts& c) {
    MetricReport m;
    bool degenerate = false;
    m.accuracy = ratio(c.tp + c.tn, c.total(), degenerate);
    m.tp_over_correct = ratio(c.tp, c.tp + c.tn, degenerate);
    m.precision = ratio(c.tp, c.tp + c.fp, degenerate);
    m.recall = ratio(c.tp, c.tp + c.fn, degenerate);
    m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, degenerate);
    m.dice = m.f1;
    m.degenerate = degenerate;
    return m;
}

}  // namespace veinx
