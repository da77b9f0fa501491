#include "nisqchem/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nisqchem {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

void check_keys(const ojson& j, const std::string& section, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError("config: '" + section + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
}

NoiseModel parse_noise(const ojson& j, const std::string& section) {
  check_keys(j, section, {"p1", "p2"});
  NoiseModel n;
  n.p1 = j.value("p1", n.p1);
  n.p2 = j.value("p2", n.p2);
  return n;
}

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "adam") return Optimizer::Adam;
  if (s == "spsa") return Optimizer::Spsa;
  throw ConfigError("config: unknown optimizer '" + s + "'");
}

Mapping mapping_from_string(const std::string& s) {
  if (s == "JW") return Mapping::JW;
  if (s == "BK") return Mapping::BK;
  throw ConfigError("config: unknown mapping '" + s + "'");
}

void parse_into(PipelineConfig& cfg, const ojson& root, const fs::path& base_dir) {
  check_keys(root, "<root>",
             {"inputs", "selection", "mapping", "ansatz", "optimize", "zne", "benchmark",
              "outputs", "report_only"});

  if (root.contains("inputs")) {
    const auto& in = root.at("inputs");
    if (!in.is_object()) throw ConfigError("config: 'inputs' must map names to paths");
    for (const auto& [name, path] : in.items()) {
      if (name.empty() || name.find('/') != std::string::npos)
        throw ConfigError("config: invalid input name '" + name + "'");
      cfg.inputs.emplace_back(name, base_dir / path.get<std::string>());
    }
  }

  if (root.contains("selection")) {
    const auto& s = root.at("selection");
    check_keys(s, "selection", {"threshold", "base"});
    cfg.selection.threshold = s.value("threshold", cfg.selection.threshold);
    cfg.selection.base = s.value("base", cfg.selection.base);
  }

  if (root.contains("mapping")) {
    const auto& m = root.at("mapping");
    check_keys(m, "mapping", {"kind", "taper"});
    if (m.contains("kind")) cfg.mapping.kind = mapping_from_string(m.at("kind").get<std::string>());
    cfg.mapping.taper = m.value("taper", cfg.mapping.taper);
  }

  if (root.contains("ansatz")) {
    const auto& a = root.at("ansatz");
    check_keys(a, "ansatz", {"kind", "n_ancilla", "n_layers", "entangler", "prepare_reference"});
    try {
      if (a.contains("kind")) cfg.ansatz.kind = ansatz_kind_from_string(a.at("kind").get<std::string>());
      if (a.contains("entangler"))
        cfg.ansatz.entangler = entangler_from_string(a.at("entangler").get<std::string>());
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.ansatz.kind == AnsatzKind::HEA) cfg.ansatz.n_ancilla = 0;
    cfg.ansatz.n_ancilla = a.value("n_ancilla", cfg.ansatz.n_ancilla);
    cfg.ansatz.n_layers = a.value("n_layers", cfg.ansatz.n_layers);
    cfg.ansatz.prepare_reference = a.value("prepare_reference", cfg.ansatz.prepare_reference);
  }

  if (root.contains("optimize")) {
    const auto& o = root.at("optimize");
    check_keys(o, "optimize",
               {"optimizer", "max_iters", "seed", "adam", "spsa", "layerwise", "tol", "noise"});
    auto& opt = cfg.optimize;
    if (o.contains("optimizer")) opt.optimizer = optimizer_from_string(o.at("optimizer").get<std::string>());
    opt.max_iters = o.value("max_iters", opt.max_iters);
    opt.seed = o.value("seed", opt.seed);
    opt.layerwise = o.value("layerwise", opt.layerwise);
    opt.tol = o.value("tol", opt.tol);
    if (o.contains("adam")) {
      const auto& a = o.at("adam");
      check_keys(a, "optimize.adam", {"lr", "beta1", "beta2", "epsilon"});
      opt.adam.lr = a.value("lr", opt.adam.lr);
      opt.adam.beta1 = a.value("beta1", opt.adam.beta1);
      opt.adam.beta2 = a.value("beta2", opt.adam.beta2);
      opt.adam.epsilon = a.value("epsilon", opt.adam.epsilon);
    }
    if (o.contains("spsa")) {
      const auto& s = o.at("spsa");
      check_keys(s, "optimize.spsa", {"a", "c", "A", "alpha", "gamma"});
      opt.spsa.a = s.value("a", opt.spsa.a);
      opt.spsa.c = s.value("c", opt.spsa.c);
      if (s.contains("A")) opt.spsa.A = s.at("A").get<double>();
      opt.spsa.alpha = s.value("alpha", opt.spsa.alpha);
      opt.spsa.gamma = s.value("gamma", opt.spsa.gamma);
    }
    if (o.contains("noise") && !o.at("noise").is_null())
      opt.noise = parse_noise(o.at("noise"), "optimize.noise");
  }

  if (root.contains("zne")) {
    const auto& z = root.at("zne");
    check_keys(z, "zne", {"enabled", "factors", "noise", "average_last_steps", "repeats"});
    cfg.zne.enabled = z.value("enabled", cfg.zne.enabled);
    cfg.zne.factors = z.value("factors", cfg.zne.factors);
    if (z.contains("noise")) cfg.zne.noise = parse_noise(z.at("noise"), "zne.noise");
    cfg.zne.average_last_steps = z.value("average_last_steps", cfg.zne.average_last_steps);
    cfg.zne.repeats = z.value("repeats", cfg.zne.repeats);
  }

  if (root.contains("benchmark")) {
    const auto& b = root.at("benchmark");
    check_keys(b, "benchmark", {"p2_values", "p1", "ancillas", "n_layers", "seeds", "max_iters"});
    auto& bench = cfg.benchmark;
    bench.p2_values = b.value("p2_values", bench.p2_values);
    bench.p1 = b.value("p1", bench.p1);
    bench.ancillas = b.value("ancillas", bench.ancillas);
    bench.n_layers = b.value("n_layers", bench.n_layers);
    bench.seeds = b.value("seeds", bench.seeds);
    bench.max_iters = b.value("max_iters", bench.max_iters);
  }

  if (root.contains("outputs")) cfg.outputs = base_dir / root.at("outputs").get<std::string>();
  else cfg.outputs = base_dir / cfg.outputs;

  if (root.contains("report_only")) {
    const auto& r = root.at("report_only");
    if (!r.is_object()) throw ConfigError("config: 'report_only' must map names to energies");
    for (const auto& [name, e] : r.items()) cfg.report_energies[name] = e.get<double>();
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void PipelineConfig::validate(bool check_files) const {
  if (!(selection.threshold > 0.0 && selection.threshold <= 1.0))
    throw ConfigError("config: selection.threshold must lie in (0, 1]");
  if (mapping.taper && mapping.kind != Mapping::BK)
    throw ConfigError("config: tapering requires the BK mapping");
  if (ansatz.n_layers < 1) throw ConfigError("config: ansatz.n_layers must be >= 1");
  if (ansatz.n_ancilla < 0) throw ConfigError("config: ansatz.n_ancilla must be >= 0");
  if (ansatz.kind == AnsatzKind::HEA && ansatz.n_ancilla != 0)
    throw ConfigError("config: HEA takes no ancilla qubits");
  try {
    optimize.validate();
    if (optimize.noise) optimize.noise->validate();
    zne.noise.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (zne.enabled) {
    if (zne.factors.size() < 2) throw ConfigError("config: zne.factors needs two or more entries");
    for (int f : zne.factors)
      if (f < 1 || f % 2 == 0) throw ConfigError("config: zne.factors must be odd and >= 1");
    if (zne.repeats < 1) throw ConfigError("config: zne.repeats must be >= 1");
  }
  if (benchmark.seeds < 1 || benchmark.n_layers < 1 || benchmark.max_iters < 1)
    throw ConfigError("config: benchmark counts must be >= 1");
  if (report_energies.empty() && inputs.empty())
    throw ConfigError("config: no inputs and no report_only energies");
  std::set<std::string> names;
  for (const auto& [name, path] : inputs) {
    if (!names.insert(name).second) throw ConfigError("config: duplicate input '" + name + "'");
    if (check_files && report_energies.empty() && !fs::exists(path))
      throw ConfigError("config: input '" + name + "' not found: " + path.string());
  }
}

PipelineConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  PipelineConfig cfg;
  cfg.source_text = json_text;
  try {
    parse_into(cfg, ojson::parse(json_text), base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

MappedHamiltonian map_hamiltonian(const ActiveSpaceHamiltonian& ham, const MappingConfig& cfg) {
  const bool taper = cfg.kind == Mapping::BK && cfg.taper;
  const SpinOrdering ordering = taper ? SpinOrdering::Blocked : SpinOrdering::Interleaved;
  const FermionOperator fermion = to_fermion(ham, ordering);
  const std::uint64_t occ = reference_occupation(ham.n_act, ham.n_act_elec, ordering);

  MappedHamiltonian out;
  out.n_qubits_mapped = 2 * ham.n_act;
  if (cfg.kind == Mapping::JW) {
    out.op = jordan_wigner(fermion);
    out.reference_bits = occ;
  } else {
    out.op = bravyi_kitaev(fermion);
    out.reference_bits = BravyiKitaevTree(2 * ham.n_act).encode(occ);
  }
  out.op.set_n_qubits(out.n_qubits_mapped);
  if (taper) {
    TaperedOperator t = taper_two_qubits(out.op, ham.n_act_elec);
    out.op = std::move(t.op);
    out.reference_bits = t.reference_bits;
  }
  out.n_qubits = out.op.n_qubits();
  return out;
}

AnsatzSpec make_ansatz_spec(const AnsatzConfig& cfg, const MappedHamiltonian& mapped) {
  AnsatzSpec spec;
  spec.kind = cfg.kind;
  spec.n_system = mapped.n_qubits;
  spec.n_ancilla = cfg.kind == AnsatzKind::HAA ? cfg.n_ancilla : 0;
  spec.n_layers = cfg.n_layers;
  spec.entangler = cfg.entangler;
  return spec;
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

ojson input_json(const InputReport& r) {
  ojson j;
  j["name"] = r.name;
  j["selected_orbitals"] = r.selected_orbitals;
  j["n_active_electrons"] = r.n_active_electrons;
  j["n_qubits_mapped"] = r.n_qubits_mapped;
  j["n_qubits_tapered"] = r.n_qubits_tapered;
  j["n_pauli_terms"] = r.n_pauli_terms;
  j["casci_energy"] = r.casci_energy;
  j["vqe_energy"] = r.vqe_energy;
  j["vqe_iterations"] = r.vqe_iterations;
  j["zne_energy"] = r.zne_energy ? ojson(*r.zne_energy) : ojson(nullptr);
  j["zne_r"] = r.zne_r ? ojson(*r.zne_r) : ojson(nullptr);
  if (!r.selection_warning.empty()) j["selection_warning"] = r.selection_warning;
  return j;
}

std::string selection_json(const ActiveSpaceSelection& sel) {
  ojson j;
  j["orbitals"] = sel.orbitals;
  j["threshold"] = sel.threshold;
  j["ranking"] = sel.ranking;
  ojson scores = ojson::object();
  for (const auto& [p, s] : sel.scores) scores[std::to_string(p)] = s;
  j["scores"] = std::move(scores);
  if (!sel.warning.empty()) j["warning"] = sel.warning;
  return j.dump(2) + "\n";
}

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

bool is_noiseless(const OptimizeConfig& cfg) { return !cfg.noise || cfg.noise->is_noiseless(); }

}  // namespace

std::string input_report_json(const InputReport& report) {
  return input_json(report).dump(2) + "\n";
}

InputReport run_input(const std::string& name, const OrbitalIntegrals& ints,
                      const PipelineConfig& cfg, const fs::path& dir, const std::string& upto) {
  InputReport report;
  report.name = name;

  const ActiveSpaceSelection sel = stage("select", [&] {
    const CorrelationTable table = correlation_table(ints, cfg.selection.base);
    write_text_file(dir / "correlation.csv", correlation_csv(table));
    ActiveSpaceSelection s = select_active(table, cfg.selection.threshold, ints.homo(), ints.lumo());
    write_text_file(dir / "selection.json", selection_json(s));
    return s;
  });
  report.selected_orbitals = sel.orbitals;
  report.selection_warning = sel.warning;
  if (upto == "select") return report;

  const ActiveSpaceHamiltonian ham = stage("fold_core", [&] { return fold_core(ints, sel.orbitals); });
  report.n_active_electrons = ham.n_act_elec;
  report.casci_energy = stage("casci", [&] { return ground_state(ham).energy; });

  const MappedHamiltonian mapped = stage("map", [&] {
    MappedHamiltonian m = map_hamiltonian(ham, cfg.mapping);
    write_text_file(dir / "hamiltonian.qop", serialize(m.op));
    return m;
  });
  report.n_qubits_mapped = mapped.n_qubits_mapped;
  report.n_qubits_tapered = mapped.n_qubits;
  report.n_pauli_terms = mapped.op.terms().size();
  if (upto == "map") return report;

  const Circuit circuit = stage("ansatz", [&] {
    Circuit c = build(make_ansatz_spec(cfg.ansatz, mapped));
    write_text_file(dir / "circuit.json", circuit_to_json(c));
    return c;
  });

  const OptimizeTrace trace = stage("vqe", [&] {
    try {
      OptimizeConfig oc = cfg.optimize;
      if (cfg.ansatz.prepare_reference) oc.reference_bits = mapped.reference_bits;
      OptimizeTrace t = minimize(mapped.op, circuit, oc);
      write_text_file(dir / "trace.csv", trace_csv(t));
      return t;
    } catch (const OptimizationAborted& e) {
      write_text_file(dir / "trace.csv", trace_csv(e.trace()));
      throw;
    }
  });
  report.vqe_energy = trace.best_energy;
  report.vqe_iterations = static_cast<int>(trace.records.size());

  if (upto != "vqe" && cfg.zne.enabled) {
    const ZneResult z = stage("zne", [&] {
      ZneResult r = cfg.zne.average_last_steps && !trace.recent_params.empty()
                        ? mitigated_energy_over_steps(mapped.op, circuit, trace.recent_params,
                                                      cfg.zne.noise, cfg.zne.factors)
                        : mitigated_energy(mapped.op, circuit, trace.best_params, cfg.zne.noise,
                                           cfg.zne.factors, cfg.zne.repeats, cfg.optimize.seed);
      write_text_file(dir / "zne.csv", zne_csv(r));
      write_text_file(dir / "zne.json", zne_summary_json(r));
      return r;
    });
    report.zne_energy = z.intercept;
    report.zne_r = z.r;
  }
  write_text_file(dir / "report.json", input_report_json(report));
  return report;
}

RunReport run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  RunReport run;
  run.config_hash = fnv1a_hex(cfg.source_text);
  run.seed = cfg.optimize.seed;

  if (!cfg.report_energies.empty()) {
    const auto is = cfg.report_energies.find("is"), ts = cfg.report_energies.find("ts");
    if (is == cfg.report_energies.end() || ts == cfg.report_energies.end())
      throw ConfigError("config: report_only needs 'is' and 'ts' energies");
    run.barrier_raw = barrier_kcal(is->second, ts->second);
  } else {
    std::vector<InputReport> reports(cfg.inputs.size());
    parallel_for(cfg.inputs.size(), [&](std::size_t k) {
      const auto& [name, path] = cfg.inputs[k];
      const OrbitalIntegrals ints = stage("read", [&] { return read_fcidump(path.string()); });
      reports[k] = run_input(name, ints, cfg, cfg.outputs / name);
    });
    run.inputs = std::move(reports);

    for (const auto& r : run.inputs)
      if (is_noiseless(cfg.optimize) && r.vqe_energy < r.casci_energy - 1e-9)
        run.variational_violation = true;

    auto find = [&](const std::string& n) -> const InputReport* {
      for (const auto& r : run.inputs)
        if (r.name == n) return &r;
      return nullptr;
    };
    const InputReport *is = find("is"), *ts = find("ts");
    if (is && ts) {
      run.barrier_casci = barrier_kcal(is->casci_energy, ts->casci_energy);
      run.barrier_raw = barrier_kcal(is->vqe_energy, ts->vqe_energy);
      if (is->zne_energy && ts->zne_energy)
        run.barrier_mitigated = barrier_kcal(*is->zne_energy, *ts->zne_energy);
    }
  }
  write_text_file(cfg.outputs / "report.json", report_json(run));
  return run;
}

std::string report_json(const RunReport& report) {
  ojson j;
  auto inputs = ojson::array();
  for (const auto& r : report.inputs) inputs.push_back(input_json(r));
  j["inputs"] = std::move(inputs);
  if (report.barrier_raw || report.barrier_casci || report.barrier_mitigated) {
    ojson b;
    auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };
    b["casci"] = opt(report.barrier_casci);
    b["raw"] = opt(report.barrier_raw);
    b["mitigated"] = opt(report.barrier_mitigated);
    j["barrier_kcal_per_mol"] = std::move(b);
  }
  j["variational_violation"] = report.variational_violation;
  ojson prov;
  prov["config_hash"] = report.config_hash;
  prov["seed"] = report.seed;
  prov["version"] = report.version;
  prov["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                  "." + std::to_string(EIGEN_MINOR_VERSION);
  j["provenance"] = std::move(prov);
  return j.dump(2) + "\n";
}

std::vector<NoiseBenchmarkRow> run_noise_benchmark(const MappedHamiltonian& mapped,
                                                   double exact_energy,
                                                   const NoiseBenchmarkConfig& cfg,
                                                   const OptimizeConfig& optimize) {
  struct Job {
    double p2;
    std::string label;
    Circuit circuit;
  };
  std::vector<Job> jobs;
  for (double p2 : cfg.p2_values)
    for (int n_anc : cfg.ancillas) {
      AnsatzSpec spec;
      spec.kind = AnsatzKind::HAA;
      spec.n_system = mapped.n_qubits;
      spec.n_ancilla = n_anc;
      spec.n_layers = cfg.n_layers;
      const std::string suffix = "anc" + std::to_string(n_anc);
      jobs.push_back({p2, "HAA_" + suffix, build(spec)});
      jobs.push_back({p2, "HEA_matched_" + suffix, build_gate_matched_hea(spec)});
    }

  const std::size_t n_seeds = static_cast<std::size_t>(cfg.seeds);
  std::vector<double> errors(jobs.size() * n_seeds);
  parallel_for(errors.size(), [&](std::size_t k) {
    const Job& job = jobs[k / n_seeds];
    OptimizeConfig oc = optimize;
    oc.max_iters = cfg.max_iters;
    oc.seed = optimize.seed + k % n_seeds;
    oc.noise = NoiseModel{cfg.p1, job.p2};
    oc.initial_params.reset();
    errors[k] = std::abs(minimize(mapped.op, job.circuit, oc).best_energy - exact_energy);
  });

  std::vector<NoiseBenchmarkRow> rows;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    NoiseBenchmarkRow row;
    row.p2 = jobs[j].p2;
    row.ansatz = jobs[j].label;
    row.per_seed.assign(errors.begin() + j * n_seeds, errors.begin() + (j + 1) * n_seeds);
    std::vector<double> sorted = row.per_seed;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    row.energy_error = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string benchmark_csv(const std::vector<NoiseBenchmarkRow>& rows) {
  std::string out = "p2,ansatz,energy_error\n";
  for (const auto& r : rows)
    out += format_double(r.p2) + "," + r.ansatz + "," + format_double(r.energy_error) + "\n";
  return out;
}

}  // namespace nisqchem
