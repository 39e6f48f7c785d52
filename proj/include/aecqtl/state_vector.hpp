#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace aecqtl {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 14;

enum class GateKind { H, RX, RY, RZ, U3, CNOT };

std::string_view gate_name(GateKind kind);

/// Number of rotation angles a gate of this kind takes (0, 1 or 3).
int angle_count(GateKind kind);

/// Where one rotation angle of a gate comes from.
///
/// A trainable angle reads `scale * theta[slot] + offset`; a fixed angle has
/// `slot < 0` and is just `offset`. Keeping the affine map on the gate lets
/// the trainable value stay the raw slot while the gate sees the mapped angle.
struct AngleRef {
    int slot = -1;
    double scale = 1.0;
    double offset = 0.0;

    bool trainable() const { return slot >= 0; }
    double resolve(std::span<const double> theta) const {
        return slot >= 0 ? scale * theta[static_cast<std::size_t>(slot)] + offset : offset;
    }

    static AngleRef fixed(double angle) { return {-1, 1.0, angle}; }
    static AngleRef param(int slot, double scale = 1.0, double offset = 0.0) {
        return {slot, scale, offset};
    }
};

/// One gate in a circuit. For CNOT, targets[0] is the control and
/// targets[1] the target. U3 angles are ordered (theta, phi, lambda).
struct GateOp {
    GateKind kind = GateKind::H;
    std::array<int, 2> targets{0, -1};
    std::array<AngleRef, 3> angles{};

    int num_targets() const { return kind == GateKind::CNOT ? 2 : 1; }
    int num_angles() const { return angle_count(kind); }

    static GateOp h(int q);
    static GateOp rx(int q, AngleRef a);
    static GateOp ry(int q, AngleRef a);
    static GateOp rz(int q, AngleRef a);
    static GateOp u3(int q, AngleRef theta, AngleRef phi, AngleRef lambda);
    static GateOp cnot(int control, int target);
};

/// Pure n-qubit register. Basis index bit k holds qubit k (qubit 0 is the
/// least-significant bit).
class StateVector {
  public:
    /// |0...0> on n qubits, 1 <= n <= kMaxQubits.
    explicit StateVector(int n_qubits);

    /// Takes ownership of `amplitudes`; the length must be a power of two.
    /// No normalization is performed.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    int num_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    std::span<Complex> amplitudes() { return amps_; }
    std::span<const Complex> amplitudes() const { return amps_; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }

    /// Squared 2-norm.
    double norm_squared() const;

  private:
    StateVector() = default;

    int n_qubits_ = 0;
    std::vector<Complex> amps_;
};

StateVector new_zero_state(int n_qubits);

/// Applies `gate` using already resolved angles (`angles.size()` must be at
/// least gate.num_angles()).
void apply_gate(StateVector& state, const GateOp& gate, std::span<const double> angles);

/// Resolves the gate's angles against `theta`, then applies it.
void apply_gate_with_params(StateVector& state, const GateOp& gate, std::span<const double> theta);

/// Zero-pads x to 2^n_qubits, normalizes and installs it as real amplitudes.
StateVector amplitude_encode(std::span<const double> x, int n_qubits);

/// <Z_k>, exact.
double expect_z(const StateVector& state, int qubit);

/// <Z_k> for each qubit in `qubits`, in order, from a single sweep.
std::vector<double> expect_z_many(const StateVector& state, std::span<const int> qubits);

namespace kernels {

void hadamard(std::span<Complex> amps, int q);
void rx(std::span<Complex> amps, int q, double angle);
void ry(std::span<Complex> amps, int q, double angle);
void rz(std::span<Complex> amps, int q, double angle);
void u3(std::span<Complex> amps, int q, double theta, double phi, double lambda);
void cnot(std::span<Complex> amps, int control, int target);

/// Row-major 2x2 matrix applied to qubit q.
void single_qubit(std::span<Complex> amps, int q, const std::array<Complex, 4>& m);

} // namespace kernels

} // namespace aecqtl
