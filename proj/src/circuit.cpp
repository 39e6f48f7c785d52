#include "aecqtl/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aecqtl/errors.hpp"

namespace aecqtl {

void validate(const Circuit& circuit) {
    if (circuit.n_qubits < 1 || circuit.n_qubits > kMaxQubits) {
        throw ConfigError("circuit register size out of range");
    }
    std::vector<int> uses(circuit.num_slots, 0);
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        const GateOp& gate = circuit.gates[g];
        for (int t = 0; t < gate.num_targets(); ++t) {
            const int q = gate.targets[static_cast<std::size_t>(t)];
            if (q < 0 || q >= circuit.n_qubits) {
                throw ConfigError("gate " + std::to_string(g) + " targets qubit " +
                                  std::to_string(q) + " outside the register");
            }
        }
        if (gate.num_targets() == 2 && gate.targets[0] == gate.targets[1]) {
            throw ConfigError("gate " + std::to_string(g) + " repeats a target");
        }
        for (int a = 0; a < gate.num_angles(); ++a) {
            const AngleRef& ref = gate.angles[static_cast<std::size_t>(a)];
            if (!ref.trainable()) {
                continue;
            }
            if (static_cast<std::size_t>(ref.slot) >= circuit.num_slots) {
                throw ConfigError("gate " + std::to_string(g) + " uses slot " +
                                  std::to_string(ref.slot) + " beyond num_slots");
            }
            ++uses[static_cast<std::size_t>(ref.slot)];
        }
    }
    for (std::size_t s = 0; s < uses.size(); ++s) {
        if (uses[s] != 1) {
            throw ConfigError("slot " + std::to_string(s) + " used " + std::to_string(uses[s]) +
                              " times");
        }
    }
}

void run(const Circuit& circuit, std::span<const double> theta, StateVector& state,
         std::size_t first, std::size_t last) {
    last = std::min(last, circuit.gates.size());
    for (std::size_t g = first; g < last; ++g) {
        apply_gate_with_params(state, circuit.gates[g], theta);
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim != b.dim) {
        throw ConfigError("matrix dimension mismatch");
    }
    ComplexMatrix out(a.dim);
    for (std::size_t i = 0; i < a.dim; ++i) {
        for (std::size_t k = 0; k < a.dim; ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < a.dim; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix out(m.dim);
    for (std::size_t i = 0; i < m.dim; ++i) {
        for (std::size_t j = 0; j < m.dim; ++j) {
            out(j, i) = std::conj(m(i, j));
        }
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        d = std::max(d, std::abs(a.data[i] - b.data[i]));
    }
    return d;
}

double max_abs_diff_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < b.data.size(); ++i) {
        if (std::abs(b.data[i]) > std::abs(b.data[k])) {
            k = i;
        }
    }
    Complex phase = a.data[k] / b.data[k];
    phase /= std::abs(phase);
    double d = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        d = std::max(d, std::abs(a.data[i] - phase * b.data[i]));
    }
    return d;
}

ComplexMatrix circuit_unitary(const Circuit& circuit, std::span<const double> theta) {
    if (circuit.n_qubits > kMaxUnitaryQubits) {
        throw ConfigError("circuit_unitary is limited to " + std::to_string(kMaxUnitaryQubits) +
                          " qubits");
    }
    const std::size_t dim = std::size_t{1} << circuit.n_qubits;
    ComplexMatrix u(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<Complex> basis(dim, Complex{0.0, 0.0});
        basis[j] = 1.0;
        auto state = StateVector::from_amplitudes(std::move(basis));
        run(circuit, theta, state);
        for (std::size_t i = 0; i < dim; ++i) {
            u(i, j) = state[i];
        }
    }
    return u;
}

} // namespace aecqtl
