#include "nisqchem/mbe_select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace nisqchem {

namespace {

std::string describe(const std::vector<int>& orbitals) {
  std::string s = "{";
  for (std::size_t k = 0; k < orbitals.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(orbitals[k]);
  }
  return s + "}";
}

}  // namespace

double CorrelationTable::pair(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = delta2.find({i, j});
  return it == delta2.end() ? 0.0 : it->second;
}

double increment_energy(const OrbitalIntegrals& ints, const std::vector<int>& subset,
                        const std::vector<int>& base, const CasciOptions& opts) {
  std::set<int> merged(base.begin(), base.end());
  merged.insert(subset.begin(), subset.end());
  const auto ham = fold_core(ints, {merged.begin(), merged.end()});
  return ground_state(ham, opts).energy;
}

CorrelationTable correlation_table(const OrbitalIntegrals& ints, const std::vector<int>& base,
                                   const CasciOptions& opts) {
  CorrelationTable table;
  table.base = base;
  std::sort(table.base.begin(), table.base.end());

  std::vector<int> orbitals;
  for (int p = 0; p < ints.n_orb(); ++p)
    if (!std::binary_search(table.base.begin(), table.base.end(), p)) orbitals.push_back(p);

  std::vector<std::vector<int>> subsets;
  for (int p : orbitals) subsets.push_back({p});
  for (std::size_t a = 0; a < orbitals.size(); ++a)
    for (std::size_t b = a + 1; b < orbitals.size(); ++b)
      subsets.push_back({orbitals[a], orbitals[b]});

  table.e_ref = increment_energy(ints, {}, table.base, opts);
  std::vector<double> energies(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t k) {
    try {
      energies[k] = increment_energy(ints, subsets[k], table.base, opts);
    } catch (const std::exception& e) {
      throw Error("correlation_table: subset " + describe(subsets[k]) + " failed: " + e.what());
    }
  });

  const std::size_t n = orbitals.size();
  for (std::size_t k = 0; k < n; ++k) table.delta1[orbitals[k]] = energies[k] - table.e_ref;
  for (std::size_t k = n; k < subsets.size(); ++k) {
    const int i = subsets[k][0], j = subsets[k][1];
    table.delta2[{i, j}] =
        energies[k] - table.delta1[i] - table.delta1[j] - table.e_ref;
  }
  return table;
}

ActiveSpaceSelection select_active(const CorrelationTable& table, double threshold, int homo,
                                   int lumo) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error("select_active: threshold must lie in (0, 1]");
  ActiveSpaceSelection sel;
  sel.threshold = threshold;
  for (const auto& [p, d] : table.delta1) sel.scores[p] = std::abs(d);
  for (const auto& [key, d] : table.delta2) {
    sel.scores[key.first] += std::abs(d);
    sel.scores[key.second] += std::abs(d);
  }
  for (const auto& [p, s] : sel.scores) sel.ranking.push_back(p);
  std::stable_sort(sel.ranking.begin(), sel.ranking.end(),
                   [&](int a, int b) { return sel.scores[a] > sel.scores[b]; });

  double sigma_max = 0.0;
  for (const auto& [p, s] : sel.scores) sigma_max = std::max(sigma_max, s);

  std::set<int> chosen{homo, lumo};
  if (sigma_max > 0.0) {
    for (int p : sel.ranking)
      if (sel.scores[p] / sigma_max >= threshold) chosen.insert(p);
  } else {
    sel.warning = "all correlation scores are zero; selecting HOMO and LUMO only";
  }
  sel.orbitals.assign(chosen.begin(), chosen.end());
  return sel;
}

std::string correlation_csv(const CorrelationTable& table) {
  std::ostringstream out;
  out << "i,j,delta_hartree\n";
  char buf[64];
  for (const auto& [p, d] : table.delta1) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out << p << ',' << p << ',' << buf << '\n';
  }
  for (const auto& [key, d] : table.delta2) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out << key.first << ',' << key.second << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace nisqchem
