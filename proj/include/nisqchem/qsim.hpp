#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nisqchem/common.hpp"
#include "nisqchem/qubit_operator.hpp"

namespace nisqchem {

enum class GateKind { RX, RZ, CNOT };

std::string to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);

struct Gate {
  GateKind kind = GateKind::RX;
  std::array<int, 2> qubits{0, -1};  // CNOT: {control, target}
  double angle = 0.0;                // used when slot is empty
  std::optional<int> slot;
  int layer = 0;                     // ansatz layer tag; -1 for preparation gates

  static Gate rx(int q, std::optional<int> slot, double angle = 0.0, int layer = 0);
  static Gate rz(int q, std::optional<int> slot, double angle = 0.0, int layer = 0);
  static Gate cnot(int control, int target, int layer = 0);

  int arity() const { return kind == GateKind::CNOT ? 2 : 1; }
};

/// Gate list over n_system + n_ancilla qubits; ancillas take the highest
/// indices. Qubit q is bit q of a basis index.
struct Circuit {
  int n_system = 0;
  int n_ancilla = 0;
  int n_params = 0;
  std::vector<Gate> gates;

  int n_qubits() const { return n_system + n_ancilla; }
  std::size_t count(GateKind kind) const;
  std::size_t rotation_count() const { return count(GateKind::RX) + count(GateKind::RZ); }

  /// Throws on malformed gates, slots or qubit indices.
  void validate() const;
};

/// Depolarizing probabilities applied after every 1- and 2-qubit gate.
struct NoiseModel {
  double p1 = 1e-3;
  double p2 = 1e-2;

  bool is_noiseless() const { return p1 == 0.0 && p2 == 0.0; }
  void validate() const;
};

using Statevector = CVector;
using DensityMatrix = CMatrix;

/// Largest register the dense simulator accepts.
inline constexpr int kMaxSimulatedQubits = 12;

// Kernels over Eigen storage. A column block is treated as independent
// statevectors, so the same routine drives both simulators.
template <typename Derived>
void apply_single_qubit(Eigen::MatrixBase<Derived>& columns, const Eigen::Matrix2cd& u, int q) {
  const Eigen::Index stride = Eigen::Index{1} << q;
  for (Eigen::Index c = 0; c < columns.cols(); ++c)
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      if (i & stride) continue;
      const Complex a = columns(i, c), b = columns(i | stride, c);
      columns(i, c) = u(0, 0) * a + u(0, 1) * b;
      columns(i | stride, c) = u(1, 0) * a + u(1, 1) * b;
    }
}

template <typename Derived>
void apply_cnot(Eigen::MatrixBase<Derived>& columns, int control, int target) {
  const Eigen::Index cbit = Eigen::Index{1} << control, tbit = Eigen::Index{1} << target;
  for (Eigen::Index c = 0; c < columns.cols(); ++c)
    for (Eigen::Index i = 0; i < columns.rows(); ++i)
      if ((i & cbit) && !(i & tbit)) std::swap(columns(i, c), columns(i | tbit, c));
}

Eigen::Matrix2cd rotation_matrix(GateKind kind, double angle);

/// One gate on a statevector.
void evolve(Statevector& psi, const Gate& gate, std::span<const double> params);

/// One gate on a density matrix, followed by its depolarizing channel.
void evolve(DensityMatrix& rho, const Gate& gate, std::span<const double> params,
            const NoiseModel& noise);

/// Sequential application to |0...0>. RX(t) = exp(-i t X/2), RZ(t) = exp(-i t Z/2).
Statevector run_pure(const Circuit& circuit, std::span<const double> params);

/// rho -> U rho U+ per gate, then the depolarizing channel on the gate's
/// qubits: (1-p) rho + p I/2^k (x) tr_gate(rho).
DensityMatrix run_noisy(const Circuit& circuit, std::span<const double> params,
                        const NoiseModel& noise);

void apply_depolarizing(DensityMatrix& rho, std::span<const int> qubits, double p);

/// Reduced density matrix on the qubits not listed; their relative order is
/// kept. Tracing out every qubit yields the 1x1 matrix [tr rho].
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> traced);

/// <psi| P (x) I |psi> and tr(P rho) summed over the operator's terms.
Complex pauli_expectation(const QubitOperator& op, const Statevector& psi);
Complex pauli_expectation(const QubitOperator& op, const DensityMatrix& rho);

/// Energy of `op` (acting on system qubits) for the circuit output with the
/// ancillas discarded. Noiseless when `noise` is empty.
double expectation(const QubitOperator& op, const Circuit& circuit,
                   std::span<const double> params,
                   const std::optional<NoiseModel>& noise = std::nullopt);

/// Term list prepared once for repeated evaluation against circuit outputs.
class CompiledObservable {
 public:
  CompiledObservable(const QubitOperator& op, int n_system);

  double evaluate(const Statevector& psi) const;
  double evaluate(const DensityMatrix& rho_system) const;
  double constant() const { return constant_; }

 private:
  // Terms sharing an X mask act as one diagonal followed by the flip k -> k^x:
  // diag(k) = sum_t coefficient_t i^(#Y_t) (-1)^popcount(k & z_t).
  struct Group {
    std::uint64_t x;
    CVector diag;
  };
  std::vector<Group> groups_;
  double constant_ = 0.0;
  int n_system_ = 0;
};

/// expectation() with a pre-compiled observable.
double expectation(const CompiledObservable& obs, const Circuit& circuit,
                   std::span<const double> params,
                   const std::optional<NoiseModel>& noise = std::nullopt);

}  // namespace nisqchem
