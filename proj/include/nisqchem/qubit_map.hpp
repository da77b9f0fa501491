#pragma once

#include <map>
#include <vector>

#include "nisqchem/hamstore.hpp"
#include "nisqchem/qubit_operator.hpp"

namespace nisqchem {

struct LadderOp {
  int mode = 0;
  bool dagger = false;

  friend bool operator==(const LadderOp&, const LadderOp&) = default;
  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

using LadderProduct = std::vector<LadderOp>;

/// Sum of ladder-operator products. Stored terms are normal ordered:
/// creations left of annihilations, mode indices descending within each group.
class FermionOperator {
 public:
  using TermMap = std::map<LadderProduct, Complex>;

  FermionOperator() = default;

  /// Adds c * product, normal ordering it (anticommutator terms included).
  void add(const LadderProduct& product, Complex c);
  void add_constant(Complex c) { add({}, c); }

  const TermMap& terms() const { return terms_; }
  int n_modes() const { return n_modes_; }
  void set_n_modes(int n) { n_modes_ = n; }

 private:
  TermMap terms_;
  int n_modes_ = 0;
};

/// Expands a product into normal-ordered products with coefficients.
std::vector<std::pair<LadderProduct, Complex>> normal_ordered(const LadderProduct& product);

enum class SpinOrdering {
  Interleaved,  // mode 2p = p alpha, 2p+1 = p beta
  Blocked,      // modes [0, n) alpha, [n, 2n) beta
};

int spin_orbital(int spatial, int spin, int n_spatial, SpinOrdering ordering);

/// H = e_frozen + sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q, spin summed.
FermionOperator to_fermion(const ActiveSpaceHamiltonian& ham,
                           SpinOrdering ordering = SpinOrdering::Interleaved);

QubitOperator jordan_wigner(const FermionOperator& op);

/// Bravyi-Kitaev over a Fenwick tree built by balanced splitting of
/// [0, n). For power-of-two n this is the standard BK tree; for any even n the
/// root n-1 stores total parity and node n/2-1 stores parity of modes
/// [0, n/2).
QubitOperator bravyi_kitaev(const FermionOperator& op);

/// Fenwick tree used by bravyi_kitaev. Node k stores the parity of modes
/// [range_start[k], k].
struct BravyiKitaevTree {
  explicit BravyiKitaevTree(int n_modes);

  int n = 0;
  std::vector<int> parent;       // -1 for the root
  std::vector<int> range_start;

  std::vector<int> update_set(int j) const;    // ancestors
  std::vector<int> parity_set(int j) const;    // parity of modes < j
  std::vector<int> flip_set(int j) const;      // children
  std::vector<int> remainder_set(int j) const; // parity minus flip
  /// Encoded qubit bits for a mode occupation bitmask.
  std::uint64_t encode(std::uint64_t occupation) const;
};

/// Closed-shell reference occupation (mode bitmask) for n_elec electrons.
std::uint64_t reference_occupation(int n_spatial, int n_elec, SpinOrdering ordering);

struct TaperedOperator {
  QubitOperator op;
  std::vector<int> removed;           // original qubit indices
  std::vector<double> eigenvalues;    // Z eigenvalue substituted on each
  std::uint64_t reference_bits = 0;   // reference state on the remaining qubits
};

/// Qubits whose every term holds I or Z.
std::vector<int> z_diagonal_qubits(const QubitOperator& op);

/// Removes qubits n/2-1 (alpha-number parity) and n-1 (total parity) from a
/// blocked-ordering BK Hamiltonian, substituting the eigenvalues read off
/// the encoded closed-shell reference. Remaining qubits keep their order.
TaperedOperator taper_two_qubits(const QubitOperator& op, int n_elec);

}  // namespace nisqchem
