#include "aecqtl/ansatz.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>
#include <string>

#include "aecqtl/errors.hpp"

namespace aecqtl {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

int as_slot(std::size_t s) { return static_cast<int>(s); }

void add_u3(Circuit& c, int q, std::size_t base) {
    c.add(GateOp::u3(q, AngleRef::param(as_slot(base)), AngleRef::param(as_slot(base + 1)),
                     AngleRef::param(as_slot(base + 2))));
}

void check_size(int n_qubits, int min_qubits, int layers, std::string_view what) {
    if (n_qubits < min_qubits || n_qubits > kMaxQubits) {
        throw ConfigError(std::string(what) + " needs " + std::to_string(min_qubits) + ".." +
                          std::to_string(kMaxQubits) + " qubits, got " +
                          std::to_string(n_qubits));
    }
    if (layers < 1) {
        throw ConfigError(std::string(what) + " needs at least one layer, got " +
                          std::to_string(layers));
    }
}

} // namespace

std::string_view model_kind_name(ModelKind kind) {
    return kind == ModelKind::TLQNN ? "tlqnn" : "tlqcnn";
}

ModelKind parse_model_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "tlqnn") {
        return ModelKind::TLQNN;
    }
    if (lower == "tlqcnn") {
        return ModelKind::TLQCNN;
    }
    throw ConfigError("unknown model kind '" + std::string(text) + "'");
}

PoolingPlan make_pooling_plan(int n_qubits) {
    PoolingPlan plan;
    for (int j = 0; j + 1 < n_qubits; j += 2) {
        plan.pairs.emplace_back(j, j + 1);
        plan.discarded.push_back(j);
        plan.retained.push_back(j + 1);
    }
    if (n_qubits % 2 == 1) {
        plan.retained.push_back(n_qubits - 1);
    }
    return plan;
}

BuiltCircuit build_tlqnn(int n_qubits, int layers) {
    check_size(n_qubits, 2, layers, "TLQNN");
    BuiltCircuit out;
    Circuit& c = out.circuit;
    ParamLayout& layout = out.layout;
    c.n_qubits = n_qubits;
    const auto n = static_cast<std::size_t>(n_qubits);
    std::size_t slot = 0;
    for (int l = 0; l <= layers; ++l) {
        const bool last = l == layers;
        std::vector<std::size_t> bases(n);
        if (!last) {
            for (int q = 0; q < n_qubits; ++q) {
                c.add(GateOp::h(q));
            }
        }
        for (int q = 0; q < n_qubits; ++q) {
            bases[static_cast<std::size_t>(q)] = slot;
            add_u3(c, q, slot);
            slot += 3;
        }
        if (!last) {
            for (int q = 0; q < n_qubits; ++q) {
                c.add(GateOp::cnot(q, (q + 1) % n_qubits));
            }
        }
        layout.u3_base.push_back(std::move(bases));
    }
    c.num_slots = slot;
    layout.num_slots = slot;
    return out;
}

void build_n_block(Circuit& c, int a, int b, std::size_t alpha_slot, std::size_t beta_slot,
                   std::size_t gamma_slot, bool bookends) {
    if (a == b) {
        throw ConfigError("two-qubit block needs distinct qubits");
    }
    if (bookends) {
        c.add(GateOp::rz(b, AngleRef::fixed(kHalfPi)));
    }
    c.add(GateOp::cnot(b, a));
    c.add(GateOp::rz(a, AngleRef::param(as_slot(gamma_slot), -2.0, kHalfPi)));
    c.add(GateOp::ry(b, AngleRef::param(as_slot(alpha_slot), -2.0, kHalfPi)));
    c.add(GateOp::cnot(a, b));
    c.add(GateOp::ry(b, AngleRef::param(as_slot(beta_slot), 2.0, -kHalfPi)));
    c.add(GateOp::cnot(b, a));
    if (bookends) {
        c.add(GateOp::rz(a, AngleRef::fixed(-kHalfPi)));
    }
}

void build_conv_op(Circuit& c, int a, int b, std::size_t slot_base) {
    if (a == b) {
        throw ConfigError("convolution operator needs distinct qubits");
    }
    add_u3(c, a, slot_base);
    add_u3(c, b, slot_base + 3);
    build_n_block(c, a, b, slot_base + 6, slot_base + 7, slot_base + 8, true);
    add_u3(c, a, slot_base + 9);
    add_u3(c, b, slot_base + 12);
}

void build_pool_op(Circuit& c, int discarded, int retained, std::size_t slot_base) {
    build_n_block(c, discarded, retained, slot_base, slot_base + 1, slot_base + 2, false);
}

BuiltCircuit build_tlqcnn(int n_qubits, int fc_layers) {
    check_size(n_qubits, 3, fc_layers, "TLQCNN");
    BuiltCircuit out;
    Circuit& c = out.circuit;
    ParamLayout& layout = out.layout;
    c.n_qubits = n_qubits;
    out.pooling = make_pooling_plan(n_qubits);
    std::size_t slot = 0;

    layout.conv_gates.begin = c.gates.size();
    for (int q = 0; q + 1 < n_qubits; ++q) {
        build_conv_op(c, q, q + 1, slot);
        layout.conv_slots.push_back({slot, kConvSlots});
        slot += kConvSlots;
    }
    layout.conv_gates.count = c.gates.size() - layout.conv_gates.begin;

    layout.pool_gates.begin = c.gates.size();
    for (const auto& [drop, keep] : out.pooling.pairs) {
        build_pool_op(c, drop, keep, slot);
        layout.pool_slots.push_back({slot, kPoolSlots});
        slot += kPoolSlots;
    }
    layout.pool_gates.count = c.gates.size() - layout.pool_gates.begin;

    const auto& kept = out.pooling.retained;
    layout.fc_gates.begin = c.gates.size();
    for (int l = 0; l <= fc_layers; ++l) {
        std::vector<std::size_t> row;
        for (int q : kept) {
            row.push_back(slot);
            c.add(GateOp::ry(q, AngleRef::param(as_slot(slot))));
            ++slot;
        }
        layout.fc.push_back(std::move(row));
        if (l == fc_layers) {
            break;
        }
        for (std::size_t j = 0; j + 1 < kept.size(); ++j) {
            c.add(GateOp::cnot(kept[j], kept[j + 1]));
        }
    }
    layout.fc_gates.count = c.gates.size() - layout.fc_gates.begin;

    c.num_slots = slot;
    layout.num_slots = slot;
    return out;
}

BuiltCircuit build_circuit(ModelKind kind, int n_qubits, int layers) {
    return kind == ModelKind::TLQNN ? build_tlqnn(n_qubits, layers)
                                    : build_tlqcnn(n_qubits, layers);
}

std::vector<int> measured_qubits(ModelKind kind, int n_qubits) {
    if (kind == ModelKind::TLQCNN) {
        return make_pooling_plan(n_qubits).retained;
    }
    std::vector<int> all(static_cast<std::size_t>(n_qubits));
    for (int q = 0; q < n_qubits; ++q) {
        all[static_cast<std::size_t>(q)] = q;
    }
    return all;
}

ParamCount param_count(ModelKind kind, int n_qubits, int layers, int num_classes) {
    const auto n = static_cast<std::size_t>(n_qubits);
    const auto L = static_cast<std::size_t>(layers);
    const auto k = static_cast<std::size_t>(num_classes);
    if (kind == ModelKind::TLQNN) {
        return {3 * n * (L + 1), k * (n + 1)};
    }
    const std::size_t half_up = (n + 1) / 2;
    return {kConvSlots * (n - 1) + kPoolSlots * (n / 2) + (L + 1) * half_up, k * (half_up + 1)};
}

} // namespace aecqtl
