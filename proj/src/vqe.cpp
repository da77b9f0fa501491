#include "nisqchem/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "nisqchem/ansatz.hpp"

namespace nisqchem {

void OptimizeConfig::validate() const {
  if (max_iters < 1) throw Error("optimize: max_iters must be positive");
  if (!(adam.lr > 0 && adam.epsilon > 0)) throw Error("optimize: Adam lr/epsilon must be positive");
  if (!(adam.beta1 > 0 && adam.beta1 < 1 && adam.beta2 > 0 && adam.beta2 < 1))
    throw Error("optimize: Adam betas must lie in (0, 1)");
  if (!(spsa.a > 0 && spsa.c > 0 && spsa.alpha > 0 && spsa.gamma > 0))
    throw Error("optimize: SPSA gains must be positive");
  if (spsa.A && *spsa.A < 0) throw Error("optimize: SPSA A must be non-negative");
  if (!(tol > 0)) throw Error("optimize: tol must be positive");
  if (noise) noise->validate();
}

namespace {

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Energy of one circuit with a fixed observable and noise setting.
class Objective {
 public:
  Objective(const QubitOperator& op, Circuit circuit, std::optional<NoiseModel> noise)
      : obs_(op, circuit.n_system), circuit_(std::move(circuit)), noise_(std::move(noise)) {}

  double operator()(std::span<const double> params) const {
    return expectation(obs_, circuit_, params, noise_);
  }

  const Circuit& circuit() const { return circuit_; }

  // Parameter-shift gradient restricted to `active` slots (all when empty).
  // Each parametric gate occurrence is shifted on its own, so shared slots
  // accumulate exactly.
  std::vector<double> gradient(std::span<const double> params,
                               const std::vector<int>& active) const {
    std::vector<char> wanted(params.size(), active.empty() ? 1 : 0);
    for (int k : active) wanted[k] = 1;
    std::vector<std::size_t> sites;
    for (std::size_t k = 0; k < circuit_.gates.size(); ++k)
      if (circuit_.gates[k].slot && wanted[*circuit_.gates[k].slot]) sites.push_back(k);

    std::vector<double> values(2 * sites.size());
    const Eigen::Index dim = Eigen::Index{1} << circuit_.n_qubits();
    if (!noise_) {
      Statevector start = Statevector::Zero(dim);
      start(0) = 1.0;
      shifted_energies(
          sites, params, std::move(start),
          [](Statevector& psi, const Gate& g, std::span<const double> p) { evolve(psi, g, p); },
          [&](const Statevector& psi) { return obs_.evaluate(psi); }, values);
    } else {
      DensityMatrix start = DensityMatrix::Zero(dim, dim);
      start(0, 0) = 1.0;
      std::vector<int> ancillas;
      for (int q = circuit_.n_system; q < circuit_.n_qubits(); ++q) ancillas.push_back(q);
      const NoiseModel noise = *noise_;
      shifted_energies(
          sites, params, std::move(start),
          [noise](DensityMatrix& rho, const Gate& g, std::span<const double> p) {
            evolve(rho, g, p, noise);
          },
          [&](const DensityMatrix& rho) { return obs_.evaluate(partial_trace(rho, ancillas)); },
          values);
    }
    std::vector<double> grad(params.size(), 0.0);
    for (std::size_t k = 0; k < sites.size(); ++k)
      grad[*circuit_.gates[sites[k]].slot] += 0.5 * (values[2 * k] - values[2 * k + 1]);
    return grad;
  }

 private:
  // values[2k], values[2k+1] = energies with gate sites[k] shifted by +-pi/2.
  // States in front of every site are cached unless that needs over 256 MiB;
  // then each shifted run starts from the beginning.
  template <typename State, typename Step, typename Measure>
  void shifted_energies(const std::vector<std::size_t>& sites, std::span<const double> params,
                        State start, Step step, Measure measure,
                        std::vector<double>& values) const {
    const auto& gates = circuit_.gates;
    const double bytes = static_cast<double>(start.size()) * sizeof(Complex) * sites.size();
    std::vector<State> prefix;
    if (bytes <= 256.0 * (1 << 20)) {
      prefix.reserve(sites.size());
      State s = start;
      std::size_t k = 0;
      for (std::size_t site : sites) {
        for (; k < site; ++k) step(s, gates[k], params);
        prefix.push_back(s);
      }
    }
    parallel_for(values.size(), [&](std::size_t j) {
      const std::size_t site = sites[j / 2];
      State s = prefix.empty() ? start : prefix[j / 2];
      if (prefix.empty())
        for (std::size_t k = 0; k < site; ++k) step(s, gates[k], params);
      Gate shifted = gates[site];
      shifted.angle = params[*shifted.slot] + (j % 2 == 0 ? 0.5 : -0.5) * std::numbers::pi;
      shifted.slot.reset();
      step(s, shifted, params);
      for (std::size_t k = site + 1; k < gates.size(); ++k) step(s, gates[k], params);
      values[j] = measure(s);
    });
  }

  CompiledObservable obs_;
  Circuit circuit_;
  std::optional<NoiseModel> noise_;
};

class Driver {
 public:
  Driver(const OptimizeConfig& cfg, OptimizeTrace& trace, std::mt19937_64& rng)
      : cfg_(cfg), trace_(trace), rng_(rng) {}

  // Runs one optimizer stage over `active` slots for at most `budget` steps.
  void run(const Objective& f, std::vector<double>& theta, const std::vector<int>& active,
           int budget) {
    if (cfg_.optimizer == Optimizer::Adam)
      adam(f, theta, active, budget);
    else
      spsa(f, theta, active, budget);
  }

 private:
  // Records E(theta); returns true when the convergence window is satisfied.
  bool record(double energy, const std::vector<double>& theta, double grad_norm,
              double step_size) {
    TraceRecord r;
    r.iter = static_cast<int>(trace_.records.size());
    r.energy = energy;
    r.param_norm = norm(theta);
    r.grad_norm = grad_norm;
    r.step_size = step_size;
    trace_.records.push_back(r);
    trace_.recent_params.push_back(theta);
    if (trace_.recent_params.size() > 10) trace_.recent_params.erase(trace_.recent_params.begin());
    if (!std::isfinite(energy)) {
      trace_.final_params = theta;
      throw OptimizationAborted("optimize: non-finite energy at iteration " +
                                    std::to_string(r.iter),
                                trace_);
    }
    if (trace_.records.size() == 1 || energy < trace_.best_energy) {
      trace_.best_energy = energy;
      trace_.best_params = theta;
    }
    if (have_previous_ && std::abs(energy - previous_) < cfg_.tol)
      ++quiet_;
    else
      quiet_ = 0;
    previous_ = energy;
    have_previous_ = true;
    return quiet_ >= 10;
  }

  void reset_window() {
    quiet_ = 0;
    have_previous_ = false;
  }

  void adam(const Objective& f, std::vector<double>& theta, const std::vector<int>& active,
            int budget) {
    reset_window();
    const auto& h = cfg_.adam;
    std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);
    for (int t = 1; t <= budget; ++t) {
      const double energy = f(theta);
      if (!std::isfinite(energy)) record(energy, theta, 0, 0);
      const auto g = f.gradient(theta, active);
      const double b1t = 1.0 - std::pow(h.beta1, t), b2t = 1.0 - std::pow(h.beta2, t);
      double step2 = 0.0;
      std::vector<double> next = theta;
      for (int k : active) {
        m[k] = h.beta1 * m[k] + (1 - h.beta1) * g[k];
        v[k] = h.beta2 * v[k] + (1 - h.beta2) * g[k] * g[k];
        const double delta = h.lr * (m[k] / b1t) / (std::sqrt(v[k] / b2t) + h.epsilon);
        next[k] -= delta;
        step2 += delta * delta;
      }
      const bool done = record(energy, theta, norm(g), std::sqrt(step2));
      theta = std::move(next);
      if (done) break;
    }
  }

  void spsa(const Objective& f, std::vector<double>& theta, const std::vector<int>& active,
            int budget) {
    reset_window();
    const auto& s = cfg_.spsa;
    const double big_a = s.A.value_or(cfg_.max_iters / 10.0);
    for (int k = 0; k < budget; ++k) {
      const double a_k = s.a / std::pow(big_a + k + 1, s.alpha);
      const double c_k = s.c / std::pow(k + 1, s.gamma);
      std::vector<double> delta(theta.size(), 0.0);
      for (int i : active) delta[i] = (rng_() & 1u) ? 1.0 : -1.0;
      std::vector<double> plus = theta, minus = theta;
      for (int i : active) {
        plus[i] += c_k * delta[i];
        minus[i] -= c_k * delta[i];
      }
      double e[3];
      const std::vector<double>* points[3] = {&theta, &plus, &minus};
      parallel_for(3, [&](std::size_t j) { e[j] = f(*points[j]); });
      const double slope = (e[1] - e[2]) / (2 * c_k);
      std::vector<double> g(theta.size(), 0.0);
      for (int i : active) g[i] = slope * delta[i];
      std::vector<double> next = theta;
      for (int i : active) next[i] -= a_k * g[i];
      const bool done = record(e[0], theta, norm(g), a_k);
      theta = std::move(next);
      if (done) break;
    }
  }

  const OptimizeConfig& cfg_;
  OptimizeTrace& trace_;
  std::mt19937_64& rng_;
  int quiet_ = 0;
  double previous_ = 0.0;
  bool have_previous_ = false;
};

std::vector<int> slots_in_layers(const Circuit& c, int lo, int hi) {
  std::vector<int> out;
  for (const auto& g : c.gates)
    if (g.slot && g.layer >= lo && g.layer <= hi) out.push_back(*g.slot);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<double> gradient(const QubitOperator& op, const Circuit& circuit,
                             std::span<const double> params,
                             const std::optional<NoiseModel>& noise) {
  if (params.size() != static_cast<std::size_t>(circuit.n_params))
    throw Error("gradient: parameter count mismatch");
  circuit.validate();
  return Objective(op, circuit, noise).gradient(params, {});
}

OptimizeTrace minimize(const QubitOperator& op, const Circuit& circuit,
                       const OptimizeConfig& cfg) {
  cfg.validate();
  circuit.validate();
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> theta(circuit.n_params);
  if (cfg.initial_params) {
    if (cfg.initial_params->size() != theta.size())
      throw Error("optimize: initial parameter count mismatch");
    theta = *cfg.initial_params;
  } else {
    std::uniform_real_distribution<double> init(-0.1, 0.1);
    for (auto& t : theta) t = init(rng);
    for (int slot : reference_slots(circuit, cfg.reference_bits)) theta[slot] += std::numbers::pi;
  }

  OptimizeTrace trace;
  Driver driver(cfg, trace, rng);
  std::vector<int> all(circuit.n_params);
  for (int k = 0; k < circuit.n_params; ++k) all[k] = k;

  int max_layer = -1;
  for (const auto& g : circuit.gates)
    if (g.slot) max_layer = std::max(max_layer, g.layer);

  if (!cfg.layerwise || max_layer < 1) {
    driver.run(Objective(op, circuit, cfg.noise), theta, all, cfg.max_iters);
  } else {
    // Grow the circuit one layer at a time, training only the newest layer,
    // then polish every parameter with the remaining budget.
    const int stages = max_layer + 1;
    const int per_stage = cfg.max_iters / (stages + 1);
    for (int l = 0; l < stages && per_stage > 0; ++l) {
      Circuit partial = circuit;
      std::erase_if(partial.gates, [&](const Gate& g) { return g.layer > l; });
      driver.run(Objective(op, partial, cfg.noise), theta, slots_in_layers(circuit, l, l),
                 per_stage);
    }
    const int remaining = cfg.max_iters - static_cast<int>(trace.records.size());
    if (remaining > 0) driver.run(Objective(op, circuit, cfg.noise), theta, all, remaining);
  }
  trace.final_params = theta;
  return trace;
}

std::string trace_csv(const OptimizeTrace& trace) {
  std::ostringstream out;
  out << "iter,energy,grad_norm,step_size\n";
  char buf[160];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.iter, r.energy, r.grad_norm,
                  r.step_size);
    out << buf;
  }
  return out.str();
}

}  // namespace nisqchem
