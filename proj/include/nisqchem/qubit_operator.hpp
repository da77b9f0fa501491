#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/SparseCore>

#include "nisqchem/common.hpp"

namespace nisqchem {

enum class Pauli : std::uint8_t { I, X, Y, Z };

/// Tensor product of single-qubit Paulis in symplectic form: qubit q carries
/// X if only x bit q is set, Z if only z, Y if both. Identity factors are
/// implicit, so at most 64 qubits are representable.
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  static PauliString single(int qubit, Pauli p);

  Pauli at(int qubit) const;
  bool is_identity() const { return (x | z) == 0; }
  std::uint64_t support() const { return x | z; }
  /// Highest qubit touched, or -1 for the identity.
  int max_qubit() const;
  int y_count() const { return popcount(x & z); }

  /// "X0 Z1 Y3"; empty for the identity.
  std::string to_string() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;
};

/// a * b as phase * PauliString.
std::pair<Complex, PauliString> multiply(const PauliString& a, const PauliString& b);

/// Weighted sum of Pauli strings.
class QubitOperator {
 public:
  using TermMap = std::map<PauliString, Complex>;

  QubitOperator() = default;
  explicit QubitOperator(int n_qubits) : n_qubits_(n_qubits) {}

  static QubitOperator identity(Complex c, int n_qubits = 0);
  static QubitOperator term(const PauliString& p, Complex c, int n_qubits = 0);

  int n_qubits() const { return n_qubits_; }
  void set_n_qubits(int n) { n_qubits_ = n; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  Complex coefficient(const PauliString& p) const;
  void add(const PauliString& p, Complex c);

  QubitOperator& operator+=(const QubitOperator& o);
  QubitOperator& operator*=(Complex c);
  friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) { return a += b; }
  friend QubitOperator operator*(const QubitOperator& a, const QubitOperator& b);
  friend QubitOperator operator*(Complex c, QubitOperator a) { return a *= c; }

  /// Highest qubit index touched, or -1.
  int max_qubit() const;
  bool is_hermitian(double tol = 1e-10) const;

 private:
  TermMap terms_;
  int n_qubits_ = 0;
};

/// Merges duplicates and drops terms with |c| < tol.
QubitOperator simplify(const QubitOperator& op, double tol = 1e-12);

/// Sparse 2^n x 2^n matrix with qubit q as bit q of the basis index.
Eigen::SparseMatrix<Complex> to_sparse(const QubitOperator& op, int n_qubits);
CMatrix to_dense(const QubitOperator& op, int n_qubits);

/// Sorted eigenvalues of a Hermitian operator (dense; small n only).
Vector spectrum(const QubitOperator& op, int n_qubits);

/// Text form: optional "# n_qubits N" line, then "coeff  pauli-string" per
/// term. Real coefficients are written as plain numbers, complex ones as
/// "(re,im)"; 17 significant digits.
std::string serialize(const QubitOperator& op);
QubitOperator parse_qubit_operator(std::string_view text);

}  // namespace nisqchem
