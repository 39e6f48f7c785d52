#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "aecqtl/state_vector.hpp"

namespace aecqtl {

/// Ordered gate program over a fixed register; consumes `num_slots`
/// trainable angles.
struct Circuit {
    int n_qubits = 0;
    std::vector<GateOp> gates;
    std::size_t num_slots = 0;

    /// Appends and returns *this so builders can chain.
    Circuit& add(const GateOp& gate) {
        gates.push_back(gate);
        return *this;
    }
};

/// Checks targets are distinct and in range, and that trainable slots cover
/// 0..num_slots-1 with each slot used by exactly one gate angle. Throws
/// ConfigError describing the first violation.
void validate(const Circuit& circuit);

/// Applies gates [first, last) to `state` with angles resolved from `theta`.
void run(const Circuit& circuit, std::span<const double> theta, StateVector& state,
         std::size_t first = 0, std::size_t last = static_cast<std::size_t>(-1));

/// Dense row-major square complex matrix.
struct ComplexMatrix {
    std::size_t dim = 0;
    std::vector<Complex> data;

    explicit ComplexMatrix(std::size_t n = 0) : dim(n), data(n * n) {}

    Complex& operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

    static ComplexMatrix identity(std::size_t n);
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& m);

/// Largest entrywise |a - b|.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest entrywise |a - e^{i phi} b| with phi chosen from the largest entry
/// of b. Suitable for comparing unitaries up to global phase.
double max_abs_diff_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b);

inline constexpr int kMaxUnitaryQubits = 4;

/// Full 2^n x 2^n matrix of the circuit; column j is the circuit applied to
/// |j>. Refuses registers larger than kMaxUnitaryQubits.
ComplexMatrix circuit_unitary(const Circuit& circuit, std::span<const double> theta);

} // namespace aecqtl
