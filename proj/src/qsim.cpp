#include "nisqchem/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nisqchem {

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

GateKind gate_kind_from_string(const std::string& name) {
  if (name == "RX") return GateKind::RX;
  if (name == "RZ") return GateKind::RZ;
  if (name == "CNOT") return GateKind::CNOT;
  throw Error("unknown gate kind '" + name + "'");
}

Gate Gate::rx(int q, std::optional<int> slot, double angle, int layer) {
  return {GateKind::RX, {q, -1}, angle, slot, layer};
}

Gate Gate::rz(int q, std::optional<int> slot, double angle, int layer) {
  return {GateKind::RZ, {q, -1}, angle, slot, layer};
}

Gate Gate::cnot(int control, int target, int layer) {
  return {GateKind::CNOT, {control, target}, 0.0, std::nullopt, layer};
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [&](const Gate& g) { return g.kind == kind; }));
}

void Circuit::validate() const {
  if (n_system < 0 || n_ancilla < 0 || n_params < 0) throw Error("circuit: negative size");
  if (n_qubits() > kMaxSimulatedQubits)
    throw Error("circuit: " + std::to_string(n_qubits()) + " qubits exceed the simulator cap of " +
                std::to_string(kMaxSimulatedQubits));
  auto check_qubit = [&](int q) {
    if (q < 0 || q >= n_qubits())
      throw Error("circuit: qubit index " + std::to_string(q) + " out of range");
  };
  for (const auto& g : gates) {
    check_qubit(g.qubits[0]);
    if (g.kind == GateKind::CNOT) {
      check_qubit(g.qubits[1]);
      if (g.qubits[0] == g.qubits[1]) throw Error("circuit: CNOT needs two distinct qubits");
      if (g.slot) throw Error("circuit: CNOT cannot carry a parameter");
    } else if (g.slot && (*g.slot < 0 || *g.slot >= n_params)) {
      throw Error("circuit: unbound parameter slot " + std::to_string(*g.slot));
    }
  }
}

void NoiseModel::validate() const {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0))
    throw Error("noise model: probabilities must lie in [0, 1]");
}

Eigen::Matrix2cd rotation_matrix(GateKind kind, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Eigen::Matrix2cd u;
  if (kind == GateKind::RX) {
    u << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0);
  } else if (kind == GateKind::RZ) {
    u << Complex(c, -s), 0, 0, Complex(c, s);
  } else {
    throw Error("rotation_matrix: CNOT is not a rotation");
  }
  return u;
}

namespace {

void check_params(const Circuit& circuit, std::span<const double> params) {
  if (params.size() != static_cast<std::size_t>(circuit.n_params))
    throw Error("parameter count mismatch: circuit expects " + std::to_string(circuit.n_params) +
                ", got " + std::to_string(params.size()));
  circuit.validate();
}

double gate_angle(const Gate& g, std::span<const double> params) {
  return g.slot ? params[*g.slot] : g.angle;
}

template <typename Derived>
void apply_gate(Eigen::MatrixBase<Derived>& columns, const Gate& g,
                std::span<const double> params) {
  if (g.kind == GateKind::CNOT)
    apply_cnot(columns, g.qubits[0], g.qubits[1]);
  else
    apply_single_qubit(columns, rotation_matrix(g.kind, gate_angle(g, params)), g.qubits[0]);
}

// Scatters the bits of `value` into the positions listed in `qubits`.
Eigen::Index scatter(Eigen::Index value, std::span<const int> qubits) {
  Eigen::Index out = 0;
  for (std::size_t k = 0; k < qubits.size(); ++k)
    if ((value >> k) & 1) out |= Eigen::Index{1} << qubits[k];
  return out;
}

}  // namespace

void evolve(Statevector& psi, const Gate& gate, std::span<const double> params) {
  apply_gate(psi, gate, params);
}

Statevector run_pure(const Circuit& circuit, std::span<const double> params) {
  check_params(circuit, params);
  Statevector psi = Statevector::Zero(Eigen::Index{1} << circuit.n_qubits());
  psi(0) = 1.0;
  for (const auto& g : circuit.gates) apply_gate(psi, g, params);
  return psi;
}

void apply_depolarizing(DensityMatrix& rho, std::span<const int> qubits, double p) {
  if (p == 0.0) return;
  std::uint64_t mask = 0;
  for (int q : qubits) mask |= std::uint64_t{1} << q;
  const Eigen::Index dim = rho.rows();
  const Eigen::Index sub = Eigen::Index{1} << qubits.size();
  DensityMatrix out = (1.0 - p) * rho;
  // (I/2^k) (x) tr_S(rho): entries with equal S-bits on both sides receive the
  // S-trace of the remaining indices.
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & static_cast<Eigen::Index>(mask)) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & static_cast<Eigen::Index>(mask)) continue;
      Complex traced = 0.0;
      for (Eigen::Index s = 0; s < sub; ++s) {
        const Eigen::Index off = scatter(s, qubits);
        traced += rho(i | off, j | off);
      }
      traced *= p / static_cast<double>(sub);
      for (Eigen::Index s = 0; s < sub; ++s) {
        const Eigen::Index off = scatter(s, qubits);
        out(i | off, j | off) += traced;
      }
    }
  }
  rho = std::move(out);
}

DensityMatrix run_noisy(const Circuit& circuit, std::span<const double> params,
                        const NoiseModel& noise) {
  check_params(circuit, params);
  noise.validate();
  const Eigen::Index dim = Eigen::Index{1} << circuit.n_qubits();
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  for (const auto& g : circuit.gates) evolve(rho, g, params, noise);
  return rho;
}

void evolve(DensityMatrix& rho, const Gate& gate, std::span<const double> params,
            const NoiseModel& noise) {
  // U rho U+ = U (U rho)+ for Hermitian rho.
  apply_gate(rho, gate, params);
  rho.adjointInPlace();
  apply_gate(rho, gate, params);
  const double p = gate.arity() == 2 ? noise.p2 : noise.p1;
  apply_depolarizing(rho, std::span<const int>(gate.qubits.data(), gate.arity()), p);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> traced) {
  const Eigen::Index dim = rho.rows();
  if (rho.cols() != dim || dim == 0 || (dim & (dim - 1)) != 0)
    throw Error("partial_trace: density matrix must be square with power-of-two size");
  const int n = __builtin_ctzll(static_cast<unsigned long long>(dim));
  std::vector<int> gone(traced.begin(), traced.end());
  std::sort(gone.begin(), gone.end());
  if (std::adjacent_find(gone.begin(), gone.end()) != gone.end())
    throw Error("partial_trace: repeated qubit");
  std::vector<int> kept;
  for (int q = 0; q < n; ++q) {
    if (std::binary_search(gone.begin(), gone.end(), q)) continue;
    kept.push_back(q);
  }
  for (int q : gone)
    if (q < 0 || q >= n) throw Error("partial_trace: qubit " + std::to_string(q) + " out of range");

  const Eigen::Index kdim = Eigen::Index{1} << kept.size();
  const Eigen::Index tdim = Eigen::Index{1} << gone.size();
  DensityMatrix out = DensityMatrix::Zero(kdim, kdim);
  for (Eigen::Index a = 0; a < kdim; ++a) {
    const Eigen::Index ia = scatter(a, kept);
    for (Eigen::Index b = 0; b < kdim; ++b) {
      const Eigen::Index ib = scatter(b, kept);
      Complex sum = 0.0;
      for (Eigen::Index t = 0; t < tdim; ++t) {
        const Eigen::Index it = scatter(t, gone);
        sum += rho(ia | it, ib | it);
      }
      out(a, b) = sum;
    }
  }
  return out;
}

CompiledObservable::CompiledObservable(const QubitOperator& op, int n_system)
    : n_system_(n_system) {
  if (op.max_qubit() >= n_system)
    throw Error("expectation: operator touches qubit " + std::to_string(op.max_qubit()) +
                " outside the " + std::to_string(n_system) + " system qubits");
  static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Eigen::Index sdim = Eigen::Index{1} << n_system;
  std::map<std::uint64_t, CVector> by_x;
  for (const auto& [p, c] : op.terms()) {
    if (p.is_identity()) {
      if (std::abs(c.imag()) > 1e-9) throw Error("expectation: non-Hermitian constant term");
      constant_ += c.real();
      continue;
    }
    auto [it, fresh] = by_x.try_emplace(p.x);
    if (fresh) it->second = CVector::Zero(sdim);
    const Complex w = c * i_pow[p.y_count() % 4];
    for (Eigen::Index k = 0; k < sdim; ++k)
      it->second(k) += popcount(static_cast<std::uint64_t>(k) & p.z) % 2 ? -w : w;
  }
  for (auto& [x, diag] : by_x) groups_.push_back({x, std::move(diag)});
}

double CompiledObservable::evaluate(const Statevector& psi) const {
  // System qubits are the low bits; every ancilla configuration is a block of
  // 2^n_system amplitudes.
  const Eigen::Index sdim = Eigen::Index{1} << n_system_;
  const Eigen::Index blocks = psi.size() / sdim;
  Complex total = 0.0;
  for (const auto& g : groups_) {
    const auto x = static_cast<Eigen::Index>(g.x);
    for (Eigen::Index blk = 0; blk < blocks; ++blk) {
      const Complex* amp = psi.data() + blk * sdim;
      for (Eigen::Index k = 0; k < sdim; ++k) total += std::conj(amp[k ^ x]) * g.diag(k) * amp[k];
    }
  }
  if (std::abs(total.imag()) > 1e-9)
    throw Error("expectation: imaginary residue " + std::to_string(total.imag()));
  return constant_ * psi.squaredNorm() + total.real();
}

double CompiledObservable::evaluate(const DensityMatrix& rho) const {
  if (rho.rows() != (Eigen::Index{1} << n_system_))
    throw Error("expectation: density matrix does not match the system register");
  Complex total = constant_ * rho.trace();
  for (const auto& g : groups_) {
    const auto x = static_cast<Eigen::Index>(g.x);
    for (Eigen::Index k = 0; k < rho.rows(); ++k) total += rho(k, k ^ x) * g.diag(k);
  }
  if (std::abs(total.imag()) > 1e-9)
    throw Error("expectation: imaginary residue " + std::to_string(total.imag()));
  return total.real();
}

Complex pauli_expectation(const QubitOperator& op, const Statevector& psi) {
  static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Complex total = 0.0;
  for (const auto& [p, c] : op.terms()) {
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
      const Complex v = std::conj(psi(k ^ static_cast<Eigen::Index>(p.x))) * psi(k);
      acc += popcount(static_cast<std::uint64_t>(k) & p.z) % 2 ? -v : v;
    }
    total += c * i_pow[p.y_count() % 4] * acc;
  }
  return total;
}

Complex pauli_expectation(const QubitOperator& op, const DensityMatrix& rho) {
  static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Complex total = 0.0;
  for (const auto& [p, c] : op.terms()) {
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < rho.rows(); ++k) {
      const Complex v = rho(k, k ^ static_cast<Eigen::Index>(p.x));
      acc += popcount(static_cast<std::uint64_t>(k) & p.z) % 2 ? -v : v;
    }
    total += c * i_pow[p.y_count() % 4] * acc;
  }
  return total;
}

double expectation(const CompiledObservable& obs, const Circuit& circuit,
                   std::span<const double> params, const std::optional<NoiseModel>& noise) {
  if (!noise) return obs.evaluate(run_pure(circuit, params));
  const DensityMatrix rho = run_noisy(circuit, params, *noise);
  std::vector<int> ancillas;
  for (int q = circuit.n_system; q < circuit.n_qubits(); ++q) ancillas.push_back(q);
  return obs.evaluate(partial_trace(rho, ancillas));
}

double expectation(const QubitOperator& op, const Circuit& circuit,
                   std::span<const double> params, const std::optional<NoiseModel>& noise) {
  return expectation(CompiledObservable(op, circuit.n_system), circuit, params, noise);
}

}  // namespace nisqchem
