#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aecqtl/ansatz.hpp"
#include "aecqtl/random.hpp"

namespace aecqtl {

struct ModelConfig {
    ModelKind kind = ModelKind::TLQNN;
    int n_qubits = 0;
    int layers = 1;
    int num_classes = 2;
    std::size_t feature_dim = 0;
};

/// Smallest n with 2^n >= dim (at least 1).
int qubits_for_dim(std::size_t dim);

/// Config for features of length `feature_dim`, sized to the smallest
/// register that holds them.
ModelConfig config_for_features(ModelKind kind, int layers, std::size_t feature_dim,
                                int num_classes = 2);

/// Trainable state: circuit angles plus the linear head. W is row-major
/// num_classes x |measured|.
struct ModelParams {
    std::vector<double> theta;
    std::vector<double> W;
    std::vector<double> b;

    std::size_t size() const { return theta.size() + W.size() + b.size(); }
};

struct ForwardTrace {
    std::vector<double> expectations;   // m, one per measured qubit
    std::vector<double> logits;         // z = W m + b
    std::vector<double> probabilities;  // softmax(z)
    int predicted = 0;
};

/// A built model: immutable circuit plus the measurement/head shape.
/// Safe to share across threads.
class HybridModel {
  public:
    explicit HybridModel(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    const BuiltCircuit& built() const { return built_; }
    const Circuit& circuit() const { return built_.circuit; }
    std::span<const int> measured() const { return measured_; }
    std::size_t num_measured() const { return measured_.size(); }
    std::size_t num_slots() const { return built_.circuit.num_slots; }
    std::size_t num_classes() const { return static_cast<std::size_t>(config_.num_classes); }
    ParamCount counts() const;

    /// Throws ConfigError if any dimension disagrees or an entry is not finite.
    void check(const ModelParams& params) const;
    ModelParams zero_params() const;

    /// Amplitude-encodes a feature vector of length feature_dim.
    StateVector encode(std::span<const double> x) const;

    /// <Z> on the measured qubits after running the circuit on `x`.
    std::vector<double> expectations(std::span<const double> theta,
                                     std::span<const double> x) const;

  private:
    ModelConfig config_;
    BuiltCircuit built_;
    std::vector<int> measured_;
};

/// Angles ~ U(0, 2 pi); W and b ~ U(-1/sqrt(m), 1/sqrt(m)) with m the
/// measured-qubit count. Draw order: theta, then W row-major, then b.
ModelParams init_params(const HybridModel& model, Rng& rng);

/// z = W m + b.
std::vector<double> linear_head(const HybridModel& model, const ModelParams& params,
                                std::span<const double> m);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> z);

/// Index of the largest entry; ties resolve to the lower index.
int argmax(std::span<const double> p);

ForwardTrace forward(const HybridModel& model, const ModelParams& params,
                     std::span<const double> x);

/// Head only, for callers that already hold the expectations.
ForwardTrace forward_from_expectations(const HybridModel& model, const ModelParams& params,
                                       std::vector<double> m);

int predict(const HybridModel& model, const ModelParams& params, std::span<const double> x);

} // namespace aecqtl
