#include "nisqchem/qubit_operator.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace nisqchem {

PauliString PauliString::single(int qubit, Pauli p) {
  if (qubit < 0 || qubit >= 64) throw Error("PauliString: qubit index out of range");
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  PauliString s;
  if (p == Pauli::X || p == Pauli::Y) s.x = bit;
  if (p == Pauli::Z || p == Pauli::Y) s.z = bit;
  return s;
}

Pauli PauliString::at(int qubit) const {
  const bool xb = (x >> qubit) & 1u, zb = (z >> qubit) & 1u;
  if (xb && zb) return Pauli::Y;
  if (xb) return Pauli::X;
  if (zb) return Pauli::Z;
  return Pauli::I;
}

int PauliString::max_qubit() const {
  const std::uint64_t s = support();
  return s == 0 ? -1 : 63 - __builtin_clzll(s);
}

std::string PauliString::to_string() const {
  std::string out;
  for (std::uint64_t s = support(); s; s &= s - 1) {
    const int q = __builtin_ctzll(s);
    if (!out.empty()) out += ' ';
    out += "IXYZ"[static_cast<int>(at(q))];
    out += std::to_string(q);
  }
  return out;
}

std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b) {
  // Per-qubit products: XY = iZ, YZ = iX, ZX = iY and reversed orders give -i.
  int i_power = 0;
  for (std::uint64_t s = a.support() & b.support(); s; s &= s - 1) {
    const int q = __builtin_ctzll(s);
    const int pa = static_cast<int>(a.at(q)), pb = static_cast<int>(b.at(q));
    if (pa == pb) continue;
    // Cyclic order X(1) -> Y(2) -> Z(3) -> X.
    i_power += (pb - pa + 3) % 3 == 1 ? 1 : 3;
  }
  static const Complex powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {powers[i_power % 4], PauliString{a.x ^ b.x, a.z ^ b.z}};
}

QubitOperator QubitOperator::identity(Complex c, int n_qubits) {
  return term(PauliString{}, c, n_qubits);
}

QubitOperator QubitOperator::term(const PauliString& p, Complex c, int n_qubits) {
  QubitOperator op(n_qubits);
  op.add(p, c);
  return op;
}

Complex QubitOperator::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? Complex{} : it->second;
}

void QubitOperator::add(const PauliString& p, Complex c) { terms_[p] += c; }

QubitOperator& QubitOperator::operator+=(const QubitOperator& o) {
  for (const auto& [p, c] : o.terms_) terms_[p] += c;
  n_qubits_ = std::max(n_qubits_, o.n_qubits_);
  return *this;
}

QubitOperator& QubitOperator::operator*=(Complex c) {
  for (auto& [p, v] : terms_) v *= c;
  return *this;
}

QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
  QubitOperator out(std::max(a.n_qubits_, b.n_qubits_));
  for (const auto& [pa, ca] : a.terms_)
    for (const auto& [pb, cb] : b.terms_) {
      const auto [phase, p] = multiply(pa, pb);
      out.terms_[p] += phase * ca * cb;
    }
  return out;
}

int QubitOperator::max_qubit() const {
  int m = -1;
  for (const auto& [p, c] : terms_) m = std::max(m, p.max_qubit());
  return m;
}

bool QubitOperator::is_hermitian(double tol) const {
  for (const auto& [p, c] : terms_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

QubitOperator simplify(const QubitOperator& op, double tol) {
  QubitOperator out(op.n_qubits());
  for (const auto& [p, c] : op.terms())
    if (std::abs(c) >= tol) out.add(p, c);
  return out;
}

Eigen::SparseMatrix<Complex> to_sparse(const QubitOperator& op, int n_qubits) {
  if (op.max_qubit() >= n_qubits) throw Error("to_sparse: operator exceeds qubit count");
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(op.size() * dim);
  static const Complex i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& [p, c] : op.terms()) {
    const Complex base = c * i_pow[p.y_count() % 4];
    for (std::size_t k = 0; k < dim; ++k) {
      const double sign = popcount(k & p.z) % 2 ? -1.0 : 1.0;
      triplets.emplace_back(k ^ p.x, k, base * sign);
    }
  }
  Eigen::SparseMatrix<Complex> m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

CMatrix to_dense(const QubitOperator& op, int n_qubits) { return CMatrix(to_sparse(op, n_qubits)); }

Vector spectrum(const QubitOperator& op, int n_qubits) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(to_dense(op, n_qubits), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::string serialize(const QubitOperator& op) {
  std::ostringstream out;
  out << "# n_qubits " << op.n_qubits() << '\n';
  char buf[96];
  for (const auto& [p, c] : op.terms()) {
    if (c.imag() == 0.0)
      std::snprintf(buf, sizeof buf, "%.17g", c.real());
    else
      std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", c.real(), c.imag());
    out << buf;
    const std::string s = p.to_string();
    if (!s.empty()) out << "  " << s;
    out << '\n';
  }
  return out.str();
}

QubitOperator parse_qubit_operator(std::string_view text) {
  QubitOperator op;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') {
      std::string key;
      int n = 0;
      if ((ls >> key >> n) && key == "n_qubits") op.set_n_qubits(n);
      continue;
    }
    Complex c;
    try {
      if (tok.front() == '(') {
        const auto comma = tok.find(',');
        if (comma == std::string::npos || tok.back() != ')') throw std::invalid_argument(tok);
        c = {std::stod(tok.substr(1, comma - 1)),
             std::stod(tok.substr(comma + 1, tok.size() - comma - 2))};
      } else {
        c = std::stod(tok);
      }
    } catch (const std::exception&) {
      throw Error("qubit operator: bad coefficient on line " + std::to_string(line_no));
    }
    PauliString p;
    while (ls >> tok) {
      Pauli letter;
      switch (tok[0]) {
        case 'X': letter = Pauli::X; break;
        case 'Y': letter = Pauli::Y; break;
        case 'Z': letter = Pauli::Z; break;
        default: throw Error("qubit operator: bad Pauli '" + tok + "' on line " +
                             std::to_string(line_no));
      }
      int q = -1;
      try {
        q = std::stoi(tok.substr(1));
      } catch (const std::exception&) {
        throw Error("qubit operator: bad qubit index in '" + tok + "'");
      }
      const PauliString f = PauliString::single(q, letter);
      if (p.support() & f.support()) throw Error("qubit operator: repeated qubit in '" + line + "'");
      p.x |= f.x;
      p.z |= f.z;
    }
    op.add(p, c);
  }
  op.set_n_qubits(std::max(op.n_qubits(), op.max_qubit() + 1));
  return op;
}

}  // namespace nisqchem
