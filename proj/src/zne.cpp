#include "nisqchem/zne.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nisqchem {

Circuit fold_cnots(const Circuit& circuit, int n) {
  if (n < 1 || n % 2 == 0) throw Error("fold_cnots: fold factor must be odd and positive");
  Circuit out = circuit;
  out.gates.clear();
  for (const auto& g : circuit.gates) {
    const int copies = g.kind == GateKind::CNOT ? n : 1;
    for (int k = 0; k < copies; ++k) out.gates.push_back(g);
  }
  return out;
}

ZneResult extrapolate(const std::vector<ZnePoint>& points) {
  std::set<int> distinct;
  for (const auto& p : points) distinct.insert(p.fold_factor);
  if (distinct.size() < 2) throw Error("extrapolate: need at least two distinct fold factors");

  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += p.fold_factor;
    my += p.energy;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : points) {
    const double dx = p.fold_factor - mx, dy = p.energy - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  ZneResult result;
  result.points = points;
  result.slope = sxy / sxx;
  result.intercept = my - result.slope * mx;
  result.r = syy > 0 ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 0.0;
  return result;
}

ZneResult mitigated_energy(const QubitOperator& op, const Circuit& circuit,
                           std::span<const double> params, const NoiseModel& noise,
                           const std::vector<int>& factors, int repeats, std::uint64_t seed) {
  (void)seed;
  if (repeats < 1) throw Error("mitigated_energy: repeats must be positive");
  // Repeats of a deterministic evaluation coincide; one evaluation per factor.
  const std::vector<double> p(params.begin(), params.end());
  return mitigated_energy_over_steps(op, circuit, {p}, noise, factors);
}

ZneResult mitigated_energy_over_steps(const QubitOperator& op, const Circuit& circuit,
                                      const std::vector<std::vector<double>>& steps,
                                      const NoiseModel& noise, const std::vector<int>& factors) {
  if (steps.empty()) throw Error("mitigated_energy: no parameter sets given");
  const CompiledObservable obs(op, circuit.n_system);
  std::vector<Circuit> folded;
  for (int f : factors) folded.push_back(fold_cnots(circuit, f));

  const std::size_t ns = steps.size();
  std::vector<double> energies(folded.size() * ns);
  parallel_for(energies.size(), [&](std::size_t k) {
    energies[k] = expectation(obs, folded[k / ns], steps[k % ns], noise);
  });

  std::vector<ZnePoint> points;
  for (std::size_t f = 0; f < folded.size(); ++f) {
    double mean = 0;
    for (std::size_t s = 0; s < ns; ++s) mean += energies[f * ns + s];
    mean /= static_cast<double>(ns);
    double var = 0;
    for (std::size_t s = 0; s < ns; ++s) var += std::pow(energies[f * ns + s] - mean, 2);
    var /= static_cast<double>(ns);
    points.push_back({factors[f], mean, std::sqrt(var)});
  }
  return extrapolate(points);
}

std::string zne_csv(const ZneResult& result) {
  std::ostringstream out;
  out << "fold_factor,energy_mean,energy_std\n";
  char buf[128];
  for (const auto& p : result.points) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", p.fold_factor, p.energy, p.spread);
    out << buf;
  }
  return out.str();
}

std::string zne_summary_json(const ZneResult& result) {
  nlohmann::ordered_json j;
  j["intercept"] = result.intercept;
  j["slope"] = result.slope;
  j["r"] = result.r;
  return j.dump(2) + "\n";
}

}  // namespace nisqchem
