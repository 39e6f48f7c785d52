#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "aecqtl/circuit.hpp"

namespace aecqtl {

enum class ModelKind { TLQNN, TLQCNN };

std::string_view model_kind_name(ModelKind kind);
/// Accepts "tlqnn" / "tlqcnn" (case-insensitive); throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view text);

/// Half-open range [begin, begin + count).
struct Range {
    std::size_t begin = 0;
    std::size_t count = 0;

    std::size_t end() const { return begin + count; }
};

/// Where each named block of a circuit keeps its trainable angles, and which
/// gates it emitted.
struct ParamLayout {
    std::size_t num_slots = 0;

    // TLQNN: first slot of the U3 on (layer, qubit); layer L is the final
    // U3-only layer. Component c in {0: theta, 1: phi, 2: lambda} is at +c.
    std::vector<std::vector<std::size_t>> u3_base;

    // TLQCNN.
    std::vector<Range> conv_slots;              // one 15-slot range per adjacent pair
    std::vector<Range> pool_slots;              // one 3-slot range per pooling pair
    std::vector<std::vector<std::size_t>> fc;   // [layer][retained index] -> RY slot
    Range conv_gates;
    Range pool_gates;
    Range fc_gates;

    std::size_t tlqnn_slot(std::size_t layer, std::size_t qubit, std::size_t component) const {
        return u3_base.at(layer).at(qubit) + component;
    }
};

/// Qubit pairing for one pooling layer: the first qubit of each pair is
/// discarded, the second retained. With odd n the last qubit is unpaired and
/// retained.
struct PoolingPlan {
    std::vector<std::pair<int, int>> pairs;  // (discarded, retained)
    std::vector<int> retained;
    std::vector<int> discarded;
};

PoolingPlan make_pooling_plan(int n_qubits);

struct BuiltCircuit {
    Circuit circuit;
    ParamLayout layout;
    PoolingPlan pooling;  // empty for TLQNN
};

/// Repeated H + U3 training block with a CNOT ring, `layers` times, then one
/// extra U3 layer. 3 n (layers + 1) slots.
BuiltCircuit build_tlqnn(int n_qubits, int layers);

/// Two-qubit canonical non-local block exp(i(a XX + b YY + c ZZ)) on (a, b),
/// realized with three CNOTs. `slots` holds the (alpha, beta, gamma) slots.
/// `bookends` adds the fixed RZ(+pi/2) on b at the start and RZ(-pi/2) on a
/// at the end; the pooling operator drops them.
void build_n_block(Circuit& circuit, int a, int b, std::size_t alpha_slot, std::size_t beta_slot,
                   std::size_t gamma_slot, bool bookends = true);

/// General two-qubit operator: U3 on each qubit, the N block, U3 on each
/// qubit. Consumes 15 slots starting at slot_base.
void build_conv_op(Circuit& circuit, int a, int b, std::size_t slot_base);

/// N block interior without bookends on (discarded a, retained b). Consumes
/// 3 slots starting at slot_base.
void build_pool_op(Circuit& circuit, int discarded, int retained, std::size_t slot_base);

inline constexpr std::size_t kConvSlots = 15;
inline constexpr std::size_t kPoolSlots = 3;

/// One conv layer over adjacent pairs, one pooling layer, then `fc_layers`
/// RY + linear-CNOT layers on the retained qubits and a final RY layer.
BuiltCircuit build_tlqcnn(int n_qubits, int fc_layers);

BuiltCircuit build_circuit(ModelKind kind, int n_qubits, int layers);

struct ParamCount {
    std::size_t quantum = 0;
    std::size_t classical = 0;

    std::size_t total() const { return quantum + classical; }
};

/// Closed-form parameter counts. Classical parameters are
/// num_classes * (measured qubits + 1).
ParamCount param_count(ModelKind kind, int n_qubits, int layers, int num_classes = 2);

/// Qubits measured by the model: all of them for TLQNN, the pooling
/// survivors for TLQCNN.
std::vector<int> measured_qubits(ModelKind kind, int n_qubits);

} // namespace aecqtl
