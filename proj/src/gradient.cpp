#include "aecqtl/gradient.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "aecqtl/errors.hpp"
#include "aecqtl/parallel.hpp"

namespace aecqtl {

namespace {

constexpr double kShift = std::numbers::pi / 2.0;

bool pauli_generated(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ ||
           kind == GateKind::U3;
}

double loss_at(const HybridModel& model, const ModelParams& params, std::span<const double> x,
               int y) {
    return ce_loss(forward(model, params, x).probabilities, y);
}

void central_difference(std::vector<double>& values, std::vector<double>& out, double h,
                        const auto& loss) {
    out.assign(values.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double saved = values[i];
        values[i] = saved + h;
        const double up = loss();
        values[i] = saved - h;
        const double down = loss();
        values[i] = saved;
        out[i] = (up - down) / (2.0 * h);
    }
}

} // namespace

double ce_loss(std::span<const double> p, int y) {
    if (y < 0 || static_cast<std::size_t>(y) >= p.size()) {
        throw ConfigError("label " + std::to_string(y) + " out of range for " +
                          std::to_string(p.size()) + " classes");
    }
    return -std::log(std::max(p[static_cast<std::size_t>(y)], kProbabilityFloor));
}

ClassicalGradient backward_classical(const HybridModel& model, const ForwardTrace& trace, int y,
                                     const ModelParams& params) {
    const std::size_t k = model.num_classes();
    const std::size_t cols = model.num_measured();
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
        throw ConfigError("label " + std::to_string(y) + " out of range");
    }
    ClassicalGradient g;
    g.d_b = trace.probabilities;
    g.d_b[static_cast<std::size_t>(y)] -= 1.0;
    g.d_W.assign(k * cols, 0.0);
    g.d_m.assign(cols, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < cols; ++j) {
            g.d_W[c * cols + j] = g.d_b[c] * trace.expectations[j];
            g.d_m[j] += params.W[c * cols + j] * g.d_b[c];
        }
    }
    return g;
}

std::vector<double> param_shift_grad(const HybridModel& model, const ModelParams& params,
                                     std::span<const double> x, std::span<const double> d_m,
                                     std::size_t* evaluations) {
    model.check(params);
    if (d_m.size() != model.num_measured()) {
        throw ConfigError("upstream gradient length does not match measured qubits");
    }
    const Circuit& circuit = model.circuit();
    const std::span<const double> theta = params.theta;
    std::vector<double> d_theta(circuit.num_slots, 0.0);
    std::size_t count = 0;

    // State just before gate g; shifted runs start from a copy of it, so only
    // the suffix of the circuit is replayed per shift.
    StateVector prefix = model.encode(x);
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        const GateOp& gate = circuit.gates[g];
        std::array<double, 3> angles{};
        for (int a = 0; a < gate.num_angles(); ++a) {
            angles[static_cast<std::size_t>(a)] = gate.angles[static_cast<std::size_t>(a)].resolve(theta);
        }
        for (int a = 0; a < gate.num_angles(); ++a) {
            const AngleRef& ref = gate.angles[static_cast<std::size_t>(a)];
            if (!ref.trainable()) {
                continue;
            }
            if (!pauli_generated(gate.kind)) {
                throw std::logic_error("slot " + std::to_string(ref.slot) + " feeds a " +
                                       std::string(gate_name(gate.kind)) +
                                       " gate, which has no shift rule");
            }
            std::array<std::vector<double>, 2> m;
            for (int side = 0; side < 2; ++side) {
                auto shifted = angles;
                shifted[static_cast<std::size_t>(a)] += side == 0 ? kShift : -kShift;
                StateVector state = prefix;
                apply_gate(state, gate, shifted);
                run(circuit, theta, state, g + 1);
                m[static_cast<std::size_t>(side)] = expect_z_many(state, model.measured());
                ++count;
            }
            double acc = 0.0;
            for (std::size_t k = 0; k < d_m.size(); ++k) {
                acc += d_m[k] * (m[0][k] - m[1][k]) / 2.0;
            }
            d_theta[static_cast<std::size_t>(ref.slot)] = ref.scale * acc;
        }
        apply_gate(prefix, gate, angles);
    }
    if (evaluations) {
        *evaluations += count;
    }
    return d_theta;
}

GradientBundle sample_gradient(const HybridModel& model, const ModelParams& params,
                               std::span<const double> x, int y, std::size_t* evaluations) {
    const ForwardTrace trace = forward(model, params, x);
    ClassicalGradient cg = backward_classical(model, trace, y, params);
    GradientBundle out;
    out.loss = ce_loss(trace.probabilities, y);
    out.d_theta = param_shift_grad(model, params, x, cg.d_m, evaluations);
    out.d_W = std::move(cg.d_W);
    out.d_b = std::move(cg.d_b);
    return out;
}

GradientBundle fd_grad(const HybridModel& model, const ModelParams& params,
                       std::span<const double> x, int y, double h) {
    if (!(h > 0.0)) {
        throw ConfigError("finite-difference step must be positive");
    }
    ModelParams work = params;
    auto loss = [&] { return loss_at(model, work, x, y); };
    GradientBundle out;
    out.loss = loss();
    central_difference(work.theta, out.d_theta, h, loss);
    central_difference(work.W, out.d_W, h, loss);
    central_difference(work.b, out.d_b, h, loss);
    return out;
}

GradientBundle batch_gradient(const HybridModel& model, const ModelParams& params,
                              std::span<const LabeledView> batch, unsigned workers) {
    if (batch.empty()) {
        throw ConfigError("batch_gradient needs at least one sample");
    }
    std::vector<GradientBundle> parts(batch.size());
    parallel_for(batch.size(), workers, [&](std::size_t i) {
        parts[i] = sample_gradient(model, params, batch[i].x, batch[i].y);
    });
    GradientBundle mean;
    mean.d_theta.assign(params.theta.size(), 0.0);
    mean.d_W.assign(params.W.size(), 0.0);
    mean.d_b.assign(params.b.size(), 0.0);
    auto accumulate = [](std::vector<double>& into, const std::vector<double>& from) {
        for (std::size_t i = 0; i < into.size(); ++i) {
            into[i] += from[i];
        }
    };
    for (const auto& p : parts) {
        mean.loss += p.loss;
        accumulate(mean.d_theta, p.d_theta);
        accumulate(mean.d_W, p.d_W);
        accumulate(mean.d_b, p.d_b);
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    mean.loss *= inv;
    for (auto* v : {&mean.d_theta, &mean.d_W, &mean.d_b}) {
        for (double& e : *v) {
            e *= inv;
        }
    }
    return mean;
}

} // namespace aecqtl
