#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nisqchem/qsim.hpp"

namespace nisqchem {

enum class Optimizer { Adam, Spsa };

struct AdamConfig {
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct SpsaConfig {
  double a = 0.2;
  double c = 0.1;
  std::optional<double> A;  // defaults to max_iters / 10
  double alpha = 0.602;
  double gamma = 0.101;
};

struct OptimizeConfig {
  Optimizer optimizer = Optimizer::Adam;
  int max_iters = 500;
  std::uint64_t seed = 0;
  AdamConfig adam;
  SpsaConfig spsa;
  bool layerwise = false;
  double tol = 1e-8;
  std::optional<NoiseModel> noise;
  /// Overrides the seeded Uniform(-0.1, 0.1) start.
  std::optional<std::vector<double>> initial_params;
  /// System basis state the seeded start prepares through pi offsets on the
  /// slots chosen by reference_slots. Ignored with initial_params.
  std::uint64_t reference_bits = 0;

  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double energy = 0.0;
  double param_norm = 0.0;
  double grad_norm = 0.0;
  double step_size = 0.0;
};

struct OptimizeTrace {
  std::vector<TraceRecord> records;
  double best_energy = 0.0;
  std::vector<double> best_params;
  std::vector<double> final_params;
  /// Parameters of the last (up to) 10 recorded iterations, oldest first.
  std::vector<std::vector<double>> recent_params;
};

/// Thrown when an energy evaluation is not finite; carries the trace so far.
class OptimizationAborted : public Error {
 public:
  OptimizationAborted(const std::string& what, OptimizeTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const OptimizeTrace& trace() const { return trace_; }

 private:
  OptimizeTrace trace_;
};

/// dE/dtheta_k = (E(theta_k + pi/2) - E(theta_k - pi/2)) / 2, summed over every
/// gate reading slot k. Noiseless unless `noise` is given.
std::vector<double> gradient(const QubitOperator& op, const Circuit& circuit,
                             std::span<const double> params,
                             const std::optional<NoiseModel>& noise = std::nullopt);

OptimizeTrace minimize(const QubitOperator& op, const Circuit& circuit,
                       const OptimizeConfig& cfg);

/// `iter,energy,grad_norm,step_size` with 17 significant digits.
std::string trace_csv(const OptimizeTrace& trace);

}  // namespace nisqchem
