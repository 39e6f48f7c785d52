#include "aecqtl/optimizer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "aecqtl/errors.hpp"
#include "aecqtl/gradient.hpp"
#include "aecqtl/metrics.hpp"
#include "aecqtl/parallel.hpp"
#include "aecqtl/random.hpp"

namespace aecqtl {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double lr) {
    if (params.size() != grads.size() || state.m.size() != params.size() ||
        state.v.size() != params.size()) {
        throw ConfigError("adam_step: parameter, gradient and moment sizes differ");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw TrainingError("non-finite gradient at flat index " + std::to_string(i) +
                                " (step " + std::to_string(state.t + 1) + ")");
        }
    }
    ++state.t;
    const double t = static_cast<double>(state.t);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw ConfigError("epochs must be at least 1");
    }
    if (batch_size < 1) {
        throw ConfigError("batch size must be at least 1");
    }
    if (!(lr0 > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
    if (decay_every < 1) {
        throw ConfigError("decay interval must be at least 1 epoch");
    }
    if (!(decay_factor > 0.0 && decay_factor <= 1.0)) {
        throw ConfigError("decay factor must be in (0, 1]");
    }
    if (repeats < 1) {
        throw ConfigError("repeats must be at least 1");
    }
}

double lr_at(const TrainConfig& config, int epoch) {
    if (epoch < 1) {
        throw ConfigError("epochs are 1-based");
    }
    return config.lr0 * std::pow(config.decay_factor, (epoch - 1) / config.decay_every);
}

std::vector<double> flatten(const ModelParams& params) {
    std::vector<double> flat;
    flat.reserve(params.size());
    flat.insert(flat.end(), params.theta.begin(), params.theta.end());
    flat.insert(flat.end(), params.W.begin(), params.W.end());
    flat.insert(flat.end(), params.b.begin(), params.b.end());
    return flat;
}

void unflatten(std::span<const double> flat, ModelParams& params) {
    if (flat.size() != params.size()) {
        throw ConfigError("flat parameter vector has the wrong length");
    }
    auto it = flat.begin();
    for (auto* v : {&params.theta, &params.W, &params.b}) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(v->size()), v->begin());
        it += static_cast<std::ptrdiff_t>(v->size());
    }
}

std::vector<double> flatten(const GradientBundle& grad) {
    std::vector<double> flat;
    flat.reserve(grad.d_theta.size() + grad.d_W.size() + grad.d_b.size());
    flat.insert(flat.end(), grad.d_theta.begin(), grad.d_theta.end());
    flat.insert(flat.end(), grad.d_W.begin(), grad.d_W.end());
    flat.insert(flat.end(), grad.d_b.begin(), grad.d_b.end());
    return flat;
}

Evaluation evaluate(const HybridModel& model, const ModelParams& params, const FeatureSet& set,
                    unsigned workers) {
    if (set.samples.empty()) {
        throw ConfigError("cannot evaluate on an empty set");
    }
    model.check(params);
    std::vector<ForwardTrace> traces(set.size());
    parallel_for(set.size(), workers, [&](std::size_t i) {
        traces[i] = forward(model, params, set.samples[i].features);
    });
    Evaluation ev;
    ev.predictions.reserve(set.size());
    ev.scores.reserve(set.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        ev.predictions.push_back(traces[i].predicted);
        ev.scores.push_back(traces[i].probabilities.size() > 1 ? traces[i].probabilities[1] : 0.0);
        loss += ce_loss(traces[i].probabilities, set.samples[i].label);
    }
    ev.mean_loss = loss / static_cast<double>(set.size());
    ev.accuracy = accuracy(ev.predictions, set.labels());
    return ev;
}

TrainResult train(const HybridModel& model, const FeatureSet& train_set,
                  const FeatureSet& test_set, const TrainConfig& config, std::uint64_t seed,
                  const EpochCallback& on_epoch) {
    config.validate();
    if (train_set.samples.empty() || test_set.samples.empty()) {
        throw ConfigError("training and test sets must be nonempty");
    }
    if (train_set.dim != model.config().feature_dim || test_set.dim != model.config().feature_dim) {
        throw ConfigError("feature dimension " + std::to_string(train_set.dim) + "/" +
                          std::to_string(test_set.dim) + " does not match the model's " +
                          std::to_string(model.config().feature_dim));
    }
    if (train_set.class_count > model.config().num_classes ||
        test_set.class_count > model.config().num_classes) {
        throw ConfigError("data has more classes than the model");
    }

    Rng rng(seed);
    TrainResult result;
    result.seed = seed;
    result.params = init_params(model, rng);
    std::vector<double> flat = flatten(result.params);
    AdamState adam = AdamState::for_size(flat.size());

    const auto all = train_set.views();
    std::vector<std::size_t> order(all.size());
    std::vector<LabeledView> batch;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = lr_at(config, epoch);
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batch.push_back(all[order[i]]);
            }
            const GradientBundle g = batch_gradient(model, result.params, batch, config.workers);
            if (!std::isfinite(g.loss)) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
            }
            loss_sum += g.loss * static_cast<double>(batch.size());
            adam_step(adam, flat, flatten(g), lr);
            unflatten(flat, result.params);
            ++result.steps;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.mean_train_loss = loss_sum / static_cast<double>(order.size());
        result.final_test = evaluate(model, result.params, test_set, config.workers);
        rec.test_accuracy = result.final_test.accuracy;
        result.curve.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }
    }
    return result;
}

std::vector<TrainResult> run_repeats(const HybridModel& model, const FeatureSet& train_set,
                                     const FeatureSet& test_set, const TrainConfig& config,
                                     const std::function<void(int, const EpochRecord&)>& on_epoch) {
    config.validate();
    std::vector<TrainResult> runs;
    runs.reserve(static_cast<std::size_t>(config.repeats));
    for (int r = 0; r < config.repeats; ++r) {
        EpochCallback cb;
        if (on_epoch) {
            cb = [&on_epoch, r](const EpochRecord& rec) { on_epoch(r, rec); };
        }
        runs.push_back(train(model, train_set, test_set, config,
                             config.seed + static_cast<std::uint64_t>(r), cb));
    }
    return runs;
}

} // namespace aecqtl
