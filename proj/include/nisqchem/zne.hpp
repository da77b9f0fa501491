#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nisqchem/qsim.hpp"

namespace nisqchem {

struct ZnePoint {
  int fold_factor = 1;
  double energy = 0.0;  // mean over repeats
  double spread = 0.0;  // standard deviation over repeats
};

struct ZneResult {
  double intercept = 0.0;  // fit at fold factor 0
  double slope = 0.0;
  double r = 0.0;          // Pearson coefficient; 0 when the energies are constant
  std::vector<ZnePoint> points;
};

/// Every CNOT replaced by n consecutive copies (n odd, >= 1).
Circuit fold_cnots(const Circuit& circuit, int n);

/// Ordinary least squares of energy against fold factor.
ZneResult extrapolate(const std::vector<ZnePoint>& points);

/// Noisy energies of the folded circuits at fixed parameters. Density-matrix
/// evaluation is deterministic, so every repeat agrees and spread is 0; the
/// seed is accepted for interface stability with sampled backends.
ZneResult mitigated_energy(const QubitOperator& op, const Circuit& circuit,
                           std::span<const double> params, const NoiseModel& noise,
                           const std::vector<int>& factors, int repeats = 10,
                           std::uint64_t seed = 0);

/// Same fit, but each fold factor's energy is the mean (and spread the
/// standard deviation) over a set of parameter vectors, e.g. the final
/// optimizer steps.
ZneResult mitigated_energy_over_steps(const QubitOperator& op, const Circuit& circuit,
                                      const std::vector<std::vector<double>>& steps,
                                      const NoiseModel& noise, const std::vector<int>& factors);

/// `fold_factor,energy_mean,energy_std`.
std::string zne_csv(const ZneResult& result);
/// {"intercept": ..., "slope": ..., "r": ...}
std::string zne_summary_json(const ZneResult& result);

}  // namespace nisqchem
