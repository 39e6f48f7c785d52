#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aecqtl/model.hpp"

namespace aecqtl {

struct GradientBundle {
    double loss = 0.0;
    std::vector<double> d_theta;
    std::vector<double> d_W;
    std::vector<double> d_b;
};

/// One labeled feature vector, by reference.
struct LabeledView {
    std::span<const double> x;
    int y = 0;
};

inline constexpr double kProbabilityFloor = 1e-12;

/// -ln max(p[y], 1e-12).
double ce_loss(std::span<const double> p, int y);

struct ClassicalGradient {
    std::vector<double> d_W;
    std::vector<double> d_b;
    std::vector<double> d_m;  // dL/d<Z_k>
};

/// Softmax cross-entropy through the linear head: with g = p - onehot(y),
/// d_b = g, d_W = g m^T, d_m = W^T g.
ClassicalGradient backward_classical(const HybridModel& model, const ForwardTrace& trace, int y,
                                     const ModelParams& params);

/// sum_k d_m[k] d<Z_k>/d theta_i for every slot i, by the +-pi/2 shift rule
/// applied to the gate angle each slot feeds (times the slot's affine
/// slope). Performs exactly 2 * num_slots shifted circuit evaluations; the
/// count is added to *evaluations when given.
std::vector<double> param_shift_grad(const HybridModel& model, const ModelParams& params,
                                     std::span<const double> x, std::span<const double> d_m,
                                     std::size_t* evaluations = nullptr);

/// Loss and full gradient for one sample: analytic head + parameter shift.
GradientBundle sample_gradient(const HybridModel& model, const ModelParams& params,
                               std::span<const double> x, int y,
                               std::size_t* evaluations = nullptr);

/// Central differences of the scalar loss in every parameter.
GradientBundle fd_grad(const HybridModel& model, const ModelParams& params,
                       std::span<const double> x, int y, double h);

/// Mean of per-sample bundles (loss included). Samples may be processed on
/// up to `workers` threads; the reduction order is fixed.
GradientBundle batch_gradient(const HybridModel& model, const ModelParams& params,
                              std::span<const LabeledView> batch, unsigned workers = 1);

} // namespace aecqtl
