#include "aecqtl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aecqtl/errors.hpp"

namespace aecqtl {

int qubits_for_dim(std::size_t dim) {
    int n = 1;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    return n;
}

ModelConfig config_for_features(ModelKind kind, int layers, std::size_t feature_dim,
                                int num_classes) {
    ModelConfig c;
    c.kind = kind;
    c.layers = layers;
    c.num_classes = num_classes;
    c.feature_dim = feature_dim;
    c.n_qubits = qubits_for_dim(feature_dim);
    return c;
}

HybridModel::HybridModel(const ModelConfig& config) : config_(config) {
    if (config.num_classes < 2) {
        throw ConfigError("num_classes must be at least 2");
    }
    if (config.n_qubits < 1 || config.n_qubits > kMaxQubits) {
        throw ConfigError("n_qubits out of range: " + std::to_string(config.n_qubits));
    }
    const std::size_t padded = std::size_t{1} << config.n_qubits;
    if (config.feature_dim == 0 || config.feature_dim > padded ||
        (config.n_qubits > 1 && config.feature_dim <= padded / 2)) {
        throw ConfigError("feature dimension " + std::to_string(config.feature_dim) +
                          " does not match a " + std::to_string(config.n_qubits) +
                          "-qubit register (needs 2^(n-1) < dim <= 2^n)");
    }
    built_ = build_circuit(config.kind, config.n_qubits, config.layers);
    measured_ = measured_qubits(config.kind, config.n_qubits);
}

ParamCount HybridModel::counts() const {
    return {num_slots(), num_classes() * (num_measured() + 1)};
}

void HybridModel::check(const ModelParams& params) const {
    if (params.theta.size() != num_slots()) {
        throw ConfigError("theta has " + std::to_string(params.theta.size()) +
                          " entries, model expects " + std::to_string(num_slots()));
    }
    if (params.W.size() != num_classes() * num_measured()) {
        throw ConfigError("W has wrong shape");
    }
    if (params.b.size() != num_classes()) {
        throw ConfigError("b has wrong length");
    }
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(params.theta) || !finite(params.W) || !finite(params.b)) {
        throw ConfigError("parameters contain non-finite entries");
    }
}

ModelParams HybridModel::zero_params() const {
    ModelParams p;
    p.theta.assign(num_slots(), 0.0);
    p.W.assign(num_classes() * num_measured(), 0.0);
    p.b.assign(num_classes(), 0.0);
    return p;
}

StateVector HybridModel::encode(std::span<const double> x) const {
    if (x.size() != config_.feature_dim) {
        throw ConfigError("feature vector has length " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(config_.feature_dim));
    }
    return amplitude_encode(x, config_.n_qubits);
}

std::vector<double> HybridModel::expectations(std::span<const double> theta,
                                              std::span<const double> x) const {
    StateVector state = encode(x);
    run(built_.circuit, theta, state);
    return expect_z_many(state, measured_);
}

ModelParams init_params(const HybridModel& model, Rng& rng) {
    ModelParams p = model.zero_params();
    for (double& t : p.theta) {
        t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(model.num_measured()));
    for (double& w : p.W) {
        w = rng.uniform(-bound, bound);
    }
    for (double& v : p.b) {
        v = rng.uniform(-bound, bound);
    }
    return p;
}

std::vector<double> linear_head(const HybridModel& model, const ModelParams& params,
                                std::span<const double> m) {
    const std::size_t k = model.num_classes();
    const std::size_t cols = model.num_measured();
    std::vector<double> z(k);
    for (std::size_t c = 0; c < k; ++c) {
        double acc = params.b[c];
        for (std::size_t j = 0; j < cols; ++j) {
            acc += params.W[c * cols + j] * m[j];
        }
        z[c] = acc;
    }
    return z;
}

std::vector<double> softmax(std::span<const double> z) {
    std::vector<double> p(z.size());
    if (z.empty()) {
        return p;
    }
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - top);
        sum += p[i];
    }
    for (double& v : p) {
        v /= sum;
    }
    return p;
}

int argmax(std::span<const double> p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) {
            best = i;
        }
    }
    return static_cast<int>(best);
}

ForwardTrace forward_from_expectations(const HybridModel& model, const ModelParams& params,
                                       std::vector<double> m) {
    ForwardTrace t;
    t.expectations = std::move(m);
    t.logits = linear_head(model, params, t.expectations);
    t.probabilities = softmax(t.logits);
    t.predicted = argmax(t.probabilities);
    return t;
}

ForwardTrace forward(const HybridModel& model, const ModelParams& params,
                     std::span<const double> x) {
    model.check(params);
    return forward_from_expectations(model, params, model.expectations(params.theta, x));
}

int predict(const HybridModel& model, const ModelParams& params, std::span<const double> x) {
    return forward(model, params, x).predicted;
}

} // namespace aecqtl
