#include "nisqchem/ansatz.hpp"


#include <algorithm>

#include "json.hpp"

namespace nisqchem {

void AnsatzSpec::validate() const {
  if (n_system < 1) throw Error("ansatz: need at least one system qubit");
  if (n_layers < 1) throw Error("ansatz: n_layers must be >= 1");
  if (n_ancilla < 0) throw Error("ansatz: negative ancilla count");
  if (kind == AnsatzKind::HEA && n_ancilla != 0)
    throw Error("ansatz: HEA does not take ancilla qubits");
  if (n_system + n_ancilla > kMaxSimulatedQubits)
    throw Error("ansatz: register exceeds the simulator cap");
}

namespace {

int template_qubits(const AnsatzSpec& spec) {
  return spec.kind == AnsatzKind::HAA ? spec.n_system + spec.n_ancilla : spec.n_system;
}

void add_triplet(Circuit& c, int q, int first_slot, int layer) {
  c.gates.push_back(Gate::rz(q, first_slot, 0.0, layer));
  c.gates.push_back(Gate::rx(q, first_slot + 1, 0.0, layer));
  c.gates.push_back(Gate::rz(q, first_slot + 2, 0.0, layer));
}

}  // namespace

int parameter_count(const AnsatzSpec& spec) {
  spec.validate();
  return 3 * template_qubits(spec) * spec.n_layers;
}

Circuit build(const AnsatzSpec& spec) {
  spec.validate();
  const int n = template_qubits(spec);
  Circuit c;
  c.n_system = spec.n_system;
  c.n_ancilla = spec.kind == AnsatzKind::HAA ? spec.n_ancilla : 0;
  c.n_params = parameter_count(spec);
  for (int l = 0; l < spec.n_layers; ++l) {
    for (int q = 0; q < n; ++q) add_triplet(c, q, (l * n + q) * 3, l);
    for (int q = 0; q + 1 < n; ++q) c.gates.push_back(Gate::cnot(q, q + 1, l));
    if (spec.entangler == Entangler::Ring && n > 2) c.gates.push_back(Gate::cnot(n - 1, 0, l));
  }
  c.validate();
  return c;
}

Circuit build_gate_matched_hea(const AnsatzSpec& haa) {
  const Circuit reference = build(haa);
  const int n_triplets = template_qubits(haa) * haa.n_layers;
  const int n_cnots = static_cast<int>(reference.count(GateKind::CNOT));
  const int n = haa.n_system;
  const int per_chain = haa.entangler == Entangler::Ring && n > 2 ? n : n - 1;
  if (n_cnots > 0 && per_chain == 0)
    throw Error("gate-matched HEA: one system qubit cannot host CNOTs");

  const int n_blocks = n_cnots == 0 ? 1 : (n_cnots + per_chain - 1) / per_chain;
  Circuit c;
  c.n_system = n;
  c.n_params = 3 * n_triplets;
  int next_triplet = 0, cnots_left = n_cnots;
  for (int b = 0; b < n_blocks; ++b) {
    // Spread triplets evenly: block b receives those with index < (b+1)*T/B.
    const int upto = static_cast<int>(static_cast<long>(n_triplets) * (b + 1) / n_blocks);
    for (; next_triplet < upto; ++next_triplet)
      add_triplet(c, next_triplet % n, 3 * next_triplet, b);
    for (int k = 0; k < per_chain && cnots_left > 0; ++k, --cnots_left)
      c.gates.push_back(k + 1 < n ? Gate::cnot(k, k + 1, b) : Gate::cnot(n - 1, 0, b));
  }
  c.validate();
  return c;
}

std::vector<int> reference_slots(const Circuit& circuit, std::uint64_t bits) {
  const int n = circuit.n_qubits();
  if (circuit.n_system < 64 && (bits >> circuit.n_system) != 0)
    throw Error("reference_slots: bits outside the system register");
  if (bits == 0) return {};

  std::vector<std::size_t> last_rx(n, circuit.gates.size());
  std::vector<int> slot(n, -1);
  for (std::size_t k = 0; k < circuit.gates.size(); ++k) {
    const Gate& g = circuit.gates[k];
    if (g.kind == GateKind::RX && g.slot) {
      last_rx[g.qubits[0]] = k;
      slot[g.qubits[0]] = *g.slot;
    }
  }
  std::uint64_t candidates = 0;
  for (int q = 0; q < n; ++q)
    if (slot[q] >= 0) candidates |= std::uint64_t{1} << q;

  const std::uint64_t system_mask = (std::uint64_t{1} << circuit.n_system) - 1;
  for (std::uint64_t flips = 1; flips < (std::uint64_t{1} << n); ++flips) {
    if (flips & ~candidates) continue;
    std::uint64_t state = 0;
    for (std::size_t k = 0; k < circuit.gates.size(); ++k) {
      const Gate& g = circuit.gates[k];
      if (g.kind == GateKind::CNOT) {
        if ((state >> g.qubits[0]) & 1u) state ^= std::uint64_t{1} << g.qubits[1];
      } else if (g.kind == GateKind::RX && k == last_rx[g.qubits[0]] &&
                 ((flips >> g.qubits[0]) & 1u)) {
        state ^= std::uint64_t{1} << g.qubits[0];
      }
    }
    if ((state & system_mask) == bits) {
      std::vector<int> out;
      for (int q = 0; q < n; ++q)
        if ((flips >> q) & 1u) out.push_back(slot[q]);
      return out;
    }
  }
  throw Error("reference_slots: reference state not reachable by last-RX flips");
}

std::string to_string(AnsatzKind kind) { return kind == AnsatzKind::HAA ? "HAA" : "HEA"; }

AnsatzKind ansatz_kind_from_string(const std::string& s) {
  if (s == "HAA") return AnsatzKind::HAA;
  if (s == "HEA") return AnsatzKind::HEA;
  throw Error("unknown ansatz kind '" + s + "'");
}

Entangler entangler_from_string(const std::string& s) {
  if (s == "chain") return Entangler::Chain;
  if (s == "ring") return Entangler::Ring;
  throw Error("unknown entangler '" + s + "'");
}

std::string circuit_to_json(const Circuit& circuit) {
  nlohmann::ordered_json j;
  j["n_system"] = circuit.n_system;
  j["n_ancilla"] = circuit.n_ancilla;
  j["n_params"] = circuit.n_params;
  auto gates = nlohmann::ordered_json::array();
  for (const auto& g : circuit.gates) {
    nlohmann::ordered_json jg;
    jg["kind"] = to_string(g.kind);
    jg["qubits"] = g.kind == GateKind::CNOT ? std::vector<int>{g.qubits[0], g.qubits[1]}
                                            : std::vector<int>{g.qubits[0]};
    if (g.slot)
      jg["slot"] = *g.slot;
    else if (g.kind != GateKind::CNOT)
      jg["angle"] = g.angle;
    jg["layer"] = g.layer;
    gates.push_back(std::move(jg));
  }
  j["gates"] = std::move(gates);
  return j.dump(2) + "\n";
}

Circuit circuit_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Circuit c;
    c.n_system = j.at("n_system").get<int>();
    c.n_ancilla = j.value("n_ancilla", 0);
    c.n_params = j.value("n_params", 0);
    for (const auto& jg : j.at("gates")) {
      Gate g;
      g.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
      const auto qubits = jg.at("qubits").get<std::vector<int>>();
      if (qubits.size() != static_cast<std::size_t>(g.arity()))
        throw Error("circuit json: wrong qubit count for " + to_string(g.kind));
      g.qubits = {qubits[0], g.arity() == 2 ? qubits[1] : -1};
      if (jg.contains("slot")) g.slot = jg.at("slot").get<int>();
      g.angle = jg.value("angle", 0.0);
      g.layer = jg.value("layer", 0);
      c.gates.push_back(g);
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("circuit json: ") + e.what());
  }
}

}  // namespace nisqchem
