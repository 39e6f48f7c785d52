#include "aecqtl/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "aecqtl/errors.hpp"

namespace aecqtl {

namespace {

// std::complex operator* goes through the Annex G NaN-recovery path unless
// -fcx-limited-range is in effect; the kernels only ever see finite values.
inline Complex cmul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline std::size_t insert_zero_bit(std::size_t k, int pos) {
    const std::size_t low = k & ((std::size_t{1} << pos) - 1);
    return ((k >> pos) << (pos + 1)) | low;
}

void check_qubit(const StateVector& state, int q) {
    if (q < 0 || q >= state.num_qubits()) {
        throw ConfigError("qubit index " + std::to_string(q) + " out of range for " +
                          std::to_string(state.num_qubits()) + "-qubit register");
    }
}

template <class F>
inline void for_each_pair(std::span<Complex> amps, int q, F&& f) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t dim = amps.size();
    Complex* a = amps.data();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            f(a[i], a[i + stride]);
        }
    }
}

} // namespace

std::string_view gate_name(GateKind kind) {
    switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::U3: return "U3";
    case GateKind::CNOT: return "CNOT";
    }
    return "?";
}

int angle_count(GateKind kind) {
    switch (kind) {
    case GateKind::H:
    case GateKind::CNOT: return 0;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: return 1;
    case GateKind::U3: return 3;
    }
    return 0;
}

GateOp GateOp::h(int q) { return {GateKind::H, {q, -1}, {}}; }
GateOp GateOp::rx(int q, AngleRef a) { return {GateKind::RX, {q, -1}, {a, {}, {}}}; }
GateOp GateOp::ry(int q, AngleRef a) { return {GateKind::RY, {q, -1}, {a, {}, {}}}; }
GateOp GateOp::rz(int q, AngleRef a) { return {GateKind::RZ, {q, -1}, {a, {}, {}}}; }
GateOp GateOp::u3(int q, AngleRef theta, AngleRef phi, AngleRef lambda) {
    return {GateKind::U3, {q, -1}, {theta, phi, lambda}};
}
GateOp GateOp::cnot(int control, int target) { return {GateKind::CNOT, {control, target}, {}}; }

StateVector::StateVector(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("register size must be in 1.." + std::to_string(kMaxQubits) + ", got " +
                          std::to_string(n_qubits));
    }
    n_qubits_ = n_qubits;
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t n = amplitudes.size();
    if (n < 2 || (n & (n - 1)) != 0 || n > (std::size_t{1} << kMaxQubits)) {
        throw ConfigError("amplitude count must be a power of two in 2..2^" +
                          std::to_string(kMaxQubits));
    }
    StateVector s;
    s.n_qubits_ = std::countr_zero(n);
    s.amps_ = std::move(amplitudes);
    return s;
}

double StateVector::norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amps_) {
        sum += std::norm(a);
    }
    return sum;
}

StateVector new_zero_state(int n_qubits) { return StateVector(n_qubits); }

namespace kernels {

void hadamard(std::span<Complex> amps, int q) {
    const double r = std::numbers::sqrt2 / 2.0;
    for_each_pair(amps, q, [r](Complex& a0, Complex& a1) {
        const Complex x = a0;
        const Complex y = a1;
        a0 = r * (x + y);
        a1 = r * (x - y);
    });
}

void rx(std::span<Complex> amps, int q, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    for_each_pair(amps, q, [c, s](Complex& a0, Complex& a1) {
        const Complex x = a0;
        const Complex y = a1;
        // -i*s*y = (s*y.imag, -s*y.real)
        a0 = {c * x.real() + s * y.imag(), c * x.imag() - s * y.real()};
        a1 = {c * y.real() + s * x.imag(), c * y.imag() - s * x.real()};
    });
}

void ry(std::span<Complex> amps, int q, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    for_each_pair(amps, q, [c, s](Complex& a0, Complex& a1) {
        const Complex x = a0;
        const Complex y = a1;
        a0 = c * x - s * y;
        a1 = s * x + c * y;
    });
}

void rz(std::span<Complex> amps, int q, double angle) {
    const Complex e0 = std::polar(1.0, -angle / 2.0);
    const Complex e1 = std::polar(1.0, angle / 2.0);
    for_each_pair(amps, q, [e0, e1](Complex& a0, Complex& a1) {
        a0 = cmul(e0, a0);
        a1 = cmul(e1, a1);
    });
}

void u3(std::span<Complex> amps, int q, double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const std::array<Complex, 4> m{
        Complex{c, 0.0},
        -s * std::polar(1.0, lambda),
        s * std::polar(1.0, phi),
        c * std::polar(1.0, phi + lambda),
    };
    single_qubit(amps, q, m);
}

void single_qubit(std::span<Complex> amps, int q, const std::array<Complex, 4>& m) {
    for_each_pair(amps, q, [&m](Complex& a0, Complex& a1) {
        const Complex x = a0;
        const Complex y = a1;
        a0 = cmul(m[0], x) + cmul(m[1], y);
        a1 = cmul(m[2], x) + cmul(m[3], y);
    });
}

void cnot(std::span<Complex> amps, int control, int target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    const int lo = std::min(control, target);
    const int hi = std::max(control, target);
    const std::size_t quarter = amps.size() >> 2;
    Complex* a = amps.data();
    for (std::size_t k = 0; k < quarter; ++k) {
        const std::size_t i = insert_zero_bit(insert_zero_bit(k, lo), hi) | cbit;
        std::swap(a[i], a[i | tbit]);
    }
}

} // namespace kernels

void apply_gate(StateVector& state, const GateOp& gate, std::span<const double> angles) {
    if (angles.size() < static_cast<std::size_t>(gate.num_angles())) {
        throw std::logic_error("apply_gate: " + std::string(gate_name(gate.kind)) +
                               " needs resolved angles");
    }
    check_qubit(state, gate.targets[0]);
    auto amps = state.amplitudes();
    const int q = gate.targets[0];
    switch (gate.kind) {
    case GateKind::H: kernels::hadamard(amps, q); break;
    case GateKind::RX: kernels::rx(amps, q, angles[0]); break;
    case GateKind::RY: kernels::ry(amps, q, angles[0]); break;
    case GateKind::RZ: kernels::rz(amps, q, angles[0]); break;
    case GateKind::U3: kernels::u3(amps, q, angles[0], angles[1], angles[2]); break;
    case GateKind::CNOT:
        check_qubit(state, gate.targets[1]);
        if (gate.targets[0] == gate.targets[1]) {
            throw ConfigError("CNOT control and target must differ");
        }
        kernels::cnot(amps, gate.targets[0], gate.targets[1]);
        break;
    }
}

void apply_gate_with_params(StateVector& state, const GateOp& gate, std::span<const double> theta) {
    std::array<double, 3> angles{};
    for (int i = 0; i < gate.num_angles(); ++i) {
        const AngleRef& ref = gate.angles[static_cast<std::size_t>(i)];
        if (ref.trainable() && static_cast<std::size_t>(ref.slot) >= theta.size()) {
            throw std::logic_error("unresolved parameter slot " + std::to_string(ref.slot));
        }
        angles[static_cast<std::size_t>(i)] = ref.resolve(theta);
    }
    apply_gate(state, gate, angles);
}

StateVector amplitude_encode(std::span<const double> x, int n_qubits) {
    StateVector state(n_qubits);
    if (x.size() > state.dim()) {
        throw ConfigError("feature length " + std::to_string(x.size()) + " exceeds 2^" +
                          std::to_string(n_qubits));
    }
    double sum = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw ConfigError("non-finite feature value");
        }
        sum += v * v;
    }
    if (sum == 0.0) {
        throw DegenerateInputError("cannot amplitude-encode an all-zero vector");
    }
    const double inv = 1.0 / std::sqrt(sum);
    auto amps = state.amplitudes();
    amps[0] = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        amps[i] = x[i] * inv;
    }
    return state;
}

double expect_z(const StateVector& state, int qubit) {
    check_qubit(state, qubit);
    const std::size_t bit = std::size_t{1} << qubit;
    double plus = 0.0;
    double minus = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (i & bit) {
            minus += p;
        } else {
            plus += p;
        }
    }
    return plus - minus;
}

std::vector<double> expect_z_many(const StateVector& state, std::span<const int> qubits) {
    for (int q : qubits) {
        check_qubit(state, q);
    }
    std::vector<double> out(qubits.size(), 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = amps[i].real() * amps[i].real() + amps[i].imag() * amps[i].imag();
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            out[k] += (i >> qubits[k]) & 1U ? -p : p;
        }
    }
    return out;
}

} // namespace aecqtl
