#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nisqchem/common.hpp"

namespace nisqchem {

/// Spatial-orbital Hamiltonian: core energy, one-electron integrals h_pq and
/// two-electron integrals (pq|rs) in chemists' notation. Two-electron values
/// are kept once per 8-fold permutation class.
///
/// The setters exist for construction; once built the object is treated as
/// immutable and may be shared between threads.
class OrbitalIntegrals {
 public:
  OrbitalIntegrals(int n_orb, int n_elec, int ms2 = 0);

  int n_orb() const { return n_orb_; }
  int n_elec() const { return n_elec_; }
  int ms2() const { return ms2_; }

  double e_core() const { return e_core_; }
  const Matrix& h() const { return h_; }
  double h(int p, int q) const;

  /// (pq|rs); unset entries are zero.
  double eri(int p, int q, int r, int s) const;

  void set_core(double value) { e_core_ = value; }
  /// Sets h_pq and h_qp.
  void set_h(int p, int q, double value);
  /// Sets all 8 permutations of (pq|rs) at once.
  void set_eri(int p, int q, int r, int s, double value);

  /// Unique stored two-electron entries as (p, q, r, s, value) with p >= q,
  /// r >= s and pair(pq) >= pair(rs).
  struct EriEntry {
    int p, q, r, s;
    double value;
  };
  std::vector<EriEntry> unique_eri() const;

  /// Canonical HOMO/LUMO under the closed-shell reference.
  int homo() const { return n_elec_ / 2 - 1; }
  int lumo() const { return n_elec_ / 2; }
  int n_occupied() const { return n_elec_ / 2; }

 private:
  std::size_t eri_index(int p, int q, int r, int s) const;
  void check_index(int p) const;

  int n_orb_;
  int n_elec_;
  int ms2_;
  double e_core_ = 0.0;
  Matrix h_;
  std::vector<double> eri_;
};

/// Integrals folded onto an active orbital subset. Frozen occupied orbitals
/// contribute to e_frozen and h_eff; frozen virtuals are dropped.
struct ActiveSpaceHamiltonian {
  int n_act = 0;
  int n_act_elec = 0;
  double e_frozen = 0.0;
  Matrix h_eff;
  /// Dense (pq|rs) over active orbitals, index ((p*n + q)*n + r)*n + s.
  std::vector<double> eri_act;
  std::vector<int> orbital_ids;

  double eri(int p, int q, int r, int s) const {
    return eri_act[((static_cast<std::size_t>(p) * n_act + q) * n_act + r) * n_act + s];
  }
};

OrbitalIntegrals parse_fcidump(std::string_view text);
OrbitalIntegrals read_fcidump(const std::string& path);

/// Writes every nonzero stored integral with 17 significant digits, so
/// parse_fcidump(write_fcidump(x)) reproduces x bit for bit.
std::string write_fcidump(const OrbitalIntegrals& ints);

inline double eri_get(const OrbitalIntegrals& ints, int p, int q, int r, int s) {
  return ints.eri(p, q, r, s);
}

/// Active orbitals keep their integrals; occupied orbitals (index < n_elec/2)
/// outside `active` become a doubly occupied frozen core.
ActiveSpaceHamiltonian fold_core(const OrbitalIntegrals& ints, std::vector<int> active);

/// Reaction barrier (e_ts - e_is) in kcal/mol.
inline double barrier_kcal(double e_is, double e_ts) {
  return (e_ts - e_is) * kHartreeToKcalPerMol;
}

}  // namespace nisqchem
