#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nisqchem/casci.hpp"
#include "nisqchem/hamstore.hpp"

namespace nisqchem {

/// One- and two-orbital correlation increments relative to a reference
/// active set `base` (empty = closed-shell reference determinant).
struct CorrelationTable {
  double e_ref = 0.0;
  std::map<int, double> delta1;
  /// Keyed by (i, j) with i < j.
  std::map<std::pair<int, int>, double> delta2;
  std::vector<int> base;

  double pair(int i, int j) const;
};

struct ActiveSpaceSelection {
  std::vector<int> orbitals;        // ascending
  std::map<int, double> scores;     // sigma_p
  std::vector<int> ranking;         // by score descending, ties by index
  double threshold = 0.3;
  std::string warning;              // non-empty when the rule selected nothing
};

/// CASCI energy with active space base + subset and a frozen core elsewhere.
double increment_energy(const OrbitalIntegrals& ints, const std::vector<int>& subset,
                        const std::vector<int>& base, const CasciOptions& opts = {});

/// N single and N(N-1)/2 pair solves over orbitals outside `base`, evaluated
/// with parallel_for. A failing solve rethrows with the subset named.
CorrelationTable correlation_table(const OrbitalIntegrals& ints,
                                   const std::vector<int>& base = {},
                                   const CasciOptions& opts = {});

/// sigma_p = |d_p| + sum_q |d_pq|; keep p with sigma_p / sigma_max >= threshold,
/// then add HOMO and LUMO.
ActiveSpaceSelection select_active(const CorrelationTable& table, double threshold, int homo,
                                   int lumo);

/// `i,j,delta_hartree` rows; i == j rows hold the single-orbital increments.
std::string correlation_csv(const CorrelationTable& table);

}  // namespace nisqchem
