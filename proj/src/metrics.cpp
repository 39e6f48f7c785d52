#include "aecqtl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aecqtl/errors.hpp"

namespace aecqtl {

double accuracy(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.empty() || predictions.size() != truth.size()) {
        throw ConfigError("accuracy needs equal-length, nonempty label lists");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        correct += predictions[i] == truth[i] ? 1 : 0;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) {
        throw ConfigError("mean_std of an empty list");
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / n)};
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> truth) {
    if (scores.size() != truth.size()) {
        throw ConfigError("roc_auc: scores and labels differ in length");
    }
    std::size_t pos = 0;
    for (int t : truth) {
        pos += t == 1 ? 1 : 0;
    }
    const std::size_t neg = truth.size() - pos;
    if (pos == 0 || neg == 0) {
        throw ConfigError("roc_auc needs both positive and negative samples");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    double area2 = 0.0;  // twice the area, in units of (1/neg) x (1/pos) cells
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        const std::size_t tp0 = tp;
        const std::size_t fp0 = fp;
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            if (truth[order[i]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
        }
        area2 += static_cast<double>((fp - fp0) * (tp + tp0));
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
    }
    curve.auc = area2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return curve;
}

} // namespace aecqtl
