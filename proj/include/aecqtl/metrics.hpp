#pragma once

#include <span>
#include <vector>

namespace aecqtl {

/// Percentage of matching labels.
double accuracy(std::span<const int> predictions, std::span<const int> truth);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population (divide by N)
};

MeanStd mean_std(std::span<const double> values);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Points run from threshold +inf (0,0) down to -inf (1,1), one step per
/// distinct score. `auc` is the trapezoidal area under them.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// `scores` are positive-class scores; `truth` entries are 1 for positive,
/// anything else negative. Both classes must be present.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> truth);

} // namespace aecqtl
