#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nisqchem/ansatz.hpp"
#include "nisqchem/casci.hpp"
#include "nisqchem/hamstore.hpp"
#include "nisqchem/mbe_select.hpp"
#include "nisqchem/qubit_map.hpp"
#include "nisqchem/vqe.hpp"
#include "nisqchem/zne.hpp"

namespace nisqchem {

inline constexpr const char* kVersion = "0.1.0";

enum class Mapping { JW, BK };

struct SelectionConfig {
  double threshold = 0.3;
  std::vector<int> base;
};

struct MappingConfig {
  Mapping kind = Mapping::BK;
  bool taper = true;
};

struct AnsatzConfig {
  AnsatzKind kind = AnsatzKind::HAA;
  int n_ancilla = 1;
  int n_layers = 2;
  Entangler entangler = Entangler::Chain;
  /// Offset the seeded start so it prepares the mapped reference determinant.
  bool prepare_reference = false;
};

struct ZneConfig {
  bool enabled = false;
  std::vector<int> factors{1, 3, 5, 7};
  NoiseModel noise;
  /// Average the final 10 optimizer steps (true) or repeat the best point.
  bool average_last_steps = true;
  int repeats = 10;
};

struct NoiseBenchmarkConfig {
  std::vector<double> p2_values{0.005, 0.01, 0.02};
  double p1 = 1e-3;
  std::vector<int> ancillas{1, 2};
  int n_layers = 2;
  int seeds = 5;
  int max_iters = 150;
};

struct PipelineConfig {
  /// Named FCIDUMP paths, already resolved against the config directory.
  std::vector<std::pair<std::string, std::filesystem::path>> inputs;
  SelectionConfig selection;
  MappingConfig mapping;
  AnsatzConfig ansatz;
  OptimizeConfig optimize;
  ZneConfig zne;
  NoiseBenchmarkConfig benchmark;
  std::filesystem::path outputs = "out";
  /// Report-only mode: skip every stage and report barriers from these energies.
  std::map<std::string, double> report_energies;
  std::string source_text;

  void validate(bool check_files = true) const;
};

/// Raised for malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when a pipeline stage fails (CLI exit code 3).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

PipelineConfig parse_config(const std::string& json_text,
                            const std::filesystem::path& base_dir = ".");
PipelineConfig load_config(const std::filesystem::path& path);

struct MappedHamiltonian {
  QubitOperator op;
  int n_qubits_mapped = 0;
  int n_qubits = 0;
  std::uint64_t reference_bits = 0;
};

MappedHamiltonian map_hamiltonian(const ActiveSpaceHamiltonian& ham, const MappingConfig& cfg);

AnsatzSpec make_ansatz_spec(const AnsatzConfig& cfg, const MappedHamiltonian& mapped);

struct InputReport {
  std::string name;
  std::vector<int> selected_orbitals;
  int n_active_electrons = 0;
  int n_qubits_mapped = 0;
  int n_qubits_tapered = 0;
  std::size_t n_pauli_terms = 0;
  double casci_energy = 0.0;
  double vqe_energy = 0.0;
  int vqe_iterations = 0;
  std::optional<double> zne_energy;
  std::optional<double> zne_r;
  std::string selection_warning;
};

struct RunReport {
  std::vector<InputReport> inputs;
  std::optional<double> barrier_casci;
  std::optional<double> barrier_raw;
  std::optional<double> barrier_mitigated;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  /// Noiseless VQE energy below the CASCI oracle by more than 1e-9.
  bool variational_violation = false;
};

/// Stages run in order and write into `stage_dir` as they complete. `upto`
/// stops after "select", "map", "vqe" or runs everything ("zne").
InputReport run_input(const std::string& name, const OrbitalIntegrals& ints,
                      const PipelineConfig& cfg, const std::filesystem::path& stage_dir,
                      const std::string& upto = "zne");

/// Runs every input (concurrently) and writes `<out>/<input>/...` plus
/// `<out>/report.json`.
RunReport run_pipeline(const PipelineConfig& cfg);

std::string report_json(const RunReport& report);
std::string input_report_json(const InputReport& report);

struct NoiseBenchmarkRow {
  double p2 = 0.0;
  std::string ansatz;
  double energy_error = 0.0;  // median over seeds
  std::vector<double> per_seed;
};

/// Noisy VQE with HAA(n_anc) and its gate-matched HEA for every p2 value;
/// errors are |best noisy energy - exact|, median over seeds.
std::vector<NoiseBenchmarkRow> run_noise_benchmark(const MappedHamiltonian& mapped,
                                                   double exact_energy,
                                                   const NoiseBenchmarkConfig& cfg,
                                                   const OptimizeConfig& optimize);

/// `p2,ansatz,energy_error`.
std::string benchmark_csv(const std::vector<NoiseBenchmarkRow>& rows);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace nisqchem
