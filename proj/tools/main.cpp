#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nisqchem/pipeline.hpp"

namespace fs = std::filesystem;
using namespace nisqchem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr int kExitBound = 4;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string fcidump;
  std::string input;
  std::optional<double> threshold;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON pipeline config");
  cmd->add_option("--seed", f.seed, "Optimizer seed (overrides the config)");
  cmd->add_option("--out", f.out, "Output directory (overrides the config)");
}

void add_input(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--fcidump", f.fcidump, "FCIDUMP file (replaces the config inputs)");
  cmd->add_option("--input", f.input, "Name of the config input to process");
  cmd->add_option("--threshold", f.threshold, "Selection threshold in (0, 1]");
}

PipelineConfig resolve(const CommonFlags& f) {
  PipelineConfig cfg = f.config.empty() ? parse_config("{}") : load_config(f.config);
  if (f.seed) cfg.optimize.seed = *f.seed;
  if (!f.out.empty()) cfg.outputs = f.out;
  if (f.threshold) cfg.selection.threshold = *f.threshold;
  if (!f.fcidump.empty()) {
    cfg.inputs.clear();
    cfg.inputs.emplace_back(fs::path(f.fcidump).stem().string(), f.fcidump);
    cfg.report_energies.clear();
  }
  return cfg;
}

std::pair<std::string, fs::path> pick_input(const PipelineConfig& cfg, const std::string& name) {
  if (cfg.inputs.empty()) throw ConfigError("config: no input given (use --fcidump or --config)");
  if (name.empty()) return cfg.inputs.front();
  for (const auto& in : cfg.inputs)
    if (in.first == name) return in;
  throw ConfigError("config: no input named '" + name + "'");
}

InputReport run_single(const CommonFlags& f, const std::string& upto) {
  PipelineConfig cfg = resolve(f);
  cfg.report_energies.clear();
  if (upto == "zne") cfg.zne.enabled = true;
  cfg.validate();
  const auto [name, path] = pick_input(cfg, f.input);
  const OrbitalIntegrals ints = [&] {
    try {
      return read_fcidump(path.string());
    } catch (const Error& e) {
      throw StageError("read", e.what());
    }
  }();
  return run_input(name, ints, cfg, cfg.outputs / name, upto);
}

std::string format_list(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active-space selection, qubit mapping, VQE and ZNE for reaction barriers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonFlags flags;
  double e_is = 0.0, e_ts = 0.0;

  auto* select = app.add_subcommand("select", "Correlation increments and active orbitals");
  auto* map = app.add_subcommand("map", "Serialized qubit Hamiltonian of the active space");
  auto* vqe = app.add_subcommand("vqe", "Variational ground-state search");
  auto* zne = app.add_subcommand("zne", "VQE followed by zero-noise extrapolation");
  auto* barrier = app.add_subcommand("barrier", "Barrier in kcal/mol from two energies");
  auto* pipeline = app.add_subcommand("pipeline", "Full run over every configured input");
  auto* bench = app.add_subcommand("bench", "Noise sweep of HAA against gate-matched HEA");
  for (auto* cmd : {select, map, vqe, zne, barrier, pipeline, bench}) add_common(cmd, flags);
  for (auto* cmd : {select, map, vqe, zne, bench}) add_input(cmd, flags);
  barrier->add_option("--is", e_is, "Initial-state energy (hartree)")->required();
  barrier->add_option("--ts", e_ts, "Transition-state energy (hartree)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*select) {
      const InputReport r = run_single(flags, "select");
      std::printf("%s\n", format_list(r.selected_orbitals).c_str());
      if (!r.selection_warning.empty()) std::fprintf(stderr, "warning: %s\n", r.selection_warning.c_str());
    } else if (*map) {
      const InputReport r = run_single(flags, "map");
      std::printf("qubits %d -> %d, %zu Pauli terms\n", r.n_qubits_mapped, r.n_qubits_tapered,
                  r.n_pauli_terms);
    } else if (*vqe) {
      const InputReport r = run_single(flags, "vqe");
      std::printf("%.12f\n", r.vqe_energy);
    } else if (*zne) {
      const InputReport r = run_single(flags, "zne");
      std::printf("%.12f (r = %.6f)\n", *r.zne_energy, *r.zne_r);
    } else if (*barrier) {
      std::printf("%.2f\n", barrier_kcal(e_is, e_ts));
    } else if (*pipeline) {
      const PipelineConfig cfg = resolve(flags);
      const RunReport r = run_pipeline(cfg);
      std::fputs(report_json(r).c_str(), stdout);
      if (r.variational_violation) {
        std::fprintf(stderr, "error: VQE energy below the CASCI oracle\n");
        return kExitBound;
      }
    } else if (*bench) {
      PipelineConfig cfg = resolve(flags);
      cfg.validate();
      const auto [name, path] = pick_input(cfg, flags.input);
      const OrbitalIntegrals ints = read_fcidump(path.string());
      const ActiveSpaceSelection sel =
          select_active(correlation_table(ints, cfg.selection.base), cfg.selection.threshold,
                        ints.homo(), ints.lumo());
      const ActiveSpaceHamiltonian ham = fold_core(ints, sel.orbitals);
      const MappedHamiltonian mapped = map_hamiltonian(ham, cfg.mapping);
      const double exact = ground_state(ham).energy;
      const auto rows = run_noise_benchmark(mapped, exact, cfg.benchmark, cfg.optimize);
      const std::string csv = benchmark_csv(rows);
      write_text_file(cfg.outputs / name / "noise_benchmark.csv", csv);
      std::fputs(csv.c_str(), stdout);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const StageError& e) {
    std::fprintf(stderr, "stage '%s' failed: %s\n", e.stage().c_str(), e.what());
    return kExitStage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitStage;
  }
  return kExitOk;
}
