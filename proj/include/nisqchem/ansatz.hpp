#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nisqchem/qsim.hpp"

namespace nisqchem {

enum class AnsatzKind { HAA, HEA };
enum class Entangler { Chain, Ring };

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::HAA;
  int n_system = 2;
  int n_ancilla = 1;
  int n_layers = 1;
  Entangler entangler = Entangler::Chain;

  void validate() const;
};

/// Per layer: RZ RX RZ on every template qubit (system, plus ancillas for
/// HAA), then CNOT(q, q+1) down the register (and back to 0 for a ring).
/// Parameter index = (layer * n_template + qubit) * 3 + position.
Circuit build(const AnsatzSpec& spec);

/// 3 * (template qubits) * layers.
int parameter_count(const AnsatzSpec& spec);

/// HEA on the system register with exactly the rotation and CNOT counts of
/// `haa`. Triplets are handed out round-robin over the system qubits and CNOT
/// chains close each layer; the final layer's chain may be partial.
Circuit build_gate_matched_hea(const AnsatzSpec& haa);

/// Last-RX slots whose pi offset (every other angle zero) leaves the system
/// register in basis state `bits`. CNOTs permute basis states, so the flips are
/// chosen against the whole CNOT sequence; the smallest qubit mask wins.
/// Earlier layers then act on |0...0>, where their entanglers reach multi-qubit
/// excitations of the reference at first order in the angles.
std::vector<int> reference_slots(const Circuit& circuit, std::uint64_t bits);

std::string to_string(AnsatzKind kind);
AnsatzKind ansatz_kind_from_string(const std::string& s);
Entangler entangler_from_string(const std::string& s);

/// {"n_system", "n_ancilla", "n_params", "gates": [{"kind", "qubits", "slot" | "angle", "layer"}]}
std::string circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const std::string& text);

}  // namespace nisqchem
