#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aecqtl/dataset.hpp"
#include "aecqtl/model.hpp"

namespace aecqtl {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_size(std::size_t n) {
        AdamState s;
        s.m.assign(n, 0.0);
        s.v.assign(n, 0.0);
        return s;
    }
};

/// One bias-corrected Adam update of `params` in place. Throws
/// TrainingError if any gradient entry is not finite.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double lr);

struct TrainConfig {
    int epochs = 20;
    std::size_t batch_size = 4;
    double lr0 = 0.01;
    int decay_every = 10;
    double decay_factor = 0.1;
    std::uint64_t seed = 1;
    int repeats = 5;
    unsigned workers = 1;

    void validate() const;
};

/// lr0 * decay_factor^floor((epoch - 1) / decay_every), epoch 1-based.
double lr_at(const TrainConfig& config, int epoch);

/// theta, W, b concatenated in that order.
std::vector<double> flatten(const ModelParams& params);
void unflatten(std::span<const double> flat, ModelParams& params);
std::vector<double> flatten(const GradientBundle& grad);

struct Evaluation {
    std::vector<int> predictions;
    std::vector<double> scores;  // probability of class 1
    double accuracy = 0.0;       // percent
    double mean_loss = 0.0;
};

Evaluation evaluate(const HybridModel& model, const ModelParams& params, const FeatureSet& set,
                    unsigned workers = 1);

struct EpochRecord {
    int epoch = 0;
    double mean_train_loss = 0.0;
    double test_accuracy = 0.0;  // percent
};

struct TrainResult {
    std::uint64_t seed = 0;
    ModelParams params;
    std::vector<EpochRecord> curve;
    std::size_t steps = 0;
    Evaluation final_test;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam training from a fresh seeded initialization. Each epoch
/// reshuffles the training set and partitions it into batches (the last
/// may be short). Fully determined by (seed, config, data).
TrainResult train(const HybridModel& model, const FeatureSet& train_set,
                  const FeatureSet& test_set, const TrainConfig& config, std::uint64_t seed,
                  const EpochCallback& on_epoch = {});

/// config.repeats independent runs with seeds config.seed + r.
std::vector<TrainResult> run_repeats(const HybridModel& model, const FeatureSet& train_set,
                                     const FeatureSet& test_set, const TrainConfig& config,
                                     const std::function<void(int, const EpochRecord&)>& on_epoch = {});

} // namespace aecqtl
