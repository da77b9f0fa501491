#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/SparseCore>

#include "nisqchem/common.hpp"
#include "nisqchem/hamstore.hpp"

namespace nisqchem {

/// Occupation bitmasks over active orbitals (bit p = orbital p).
struct Determinant {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;

  friend bool operator==(const Determinant&, const Determinant&) = default;
  friend auto operator<=>(const Determinant&, const Determinant&) = default;
};

struct CIResult {
  double energy = 0.0;  // includes e_frozen
  Vector coefficients;
  std::vector<Determinant> basis;
};

struct CasciOptions {
  std::size_t max_determinants = 20000;
  /// Bases smaller than this are diagonalized densely.
  std::size_t dense_limit = 512;
  double residual_tol = 1e-9;
  int max_restarts = 500;
  int krylov_dim = 40;
};

/// All determinants with the given spin populations, sorted by (alpha, beta).
std::vector<Determinant> enumerate_determinants(int n_act, int n_alpha, int n_beta);

/// <d1|H|d2> by the Slater-Condon rules. Spin-orbitals are ordered alpha block
/// then beta block; a determinant is a+_{i1} a+_{i2} ... |vac> with i1 < i2 < ...
double matrix_element(const Determinant& d1, const Determinant& d2,
                      const ActiveSpaceHamiltonian& ham);

using SparseMatrix = Eigen::SparseMatrix<double>;

SparseMatrix assemble_hamiltonian(const std::vector<Determinant>& basis,
                                  const ActiveSpaceHamiltonian& ham);

struct Eigenpair {
  double value = 0.0;
  Vector vector;
};

/// Restarted Lanczos with full reorthogonalization. Only touches the operator
/// through `apply` (y = A x). Converged when ||A x - value x|| < tol.
Eigenpair lowest_eigenpair_lanczos(const std::function<void(const Vector&, Vector&)>& apply,
                                   Eigen::Index dim, const Vector& start,
                                   const CasciOptions& opts = {});

CIResult ground_state(const ActiveSpaceHamiltonian& ham, int n_alpha, int n_beta,
                      const CasciOptions& opts = {});

/// Closed-shell shortcut: n_alpha = n_beta = n_act_elec / 2.
CIResult ground_state(const ActiveSpaceHamiltonian& ham, const CasciOptions& opts = {});

}  // namespace nisqchem
