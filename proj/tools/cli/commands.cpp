// Copyright 2026 The isothc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "isothc/algorithm.hpp"
#include "isothc/csv.hpp"
#include "isothc/errors.hpp"
#include "isothc/fit.hpp"
#include "isothc/hamiltonian.hpp"
#include "isothc/resources.hpp"
#include "isothc/thc.hpp"

namespace isothc::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Flags mirrored by flat JSON config keys

class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON document with flat keys mirroring the flags");
  }

  template <class T>
  CLI::Option* option(const std::string& key, T& var, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + dashed(key), var, help);
    setters_[key] = {opt, [&var](const json& j) { var = j.get<T>(); }};
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& var, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + dashed(key), var, help);
    setters_[key] = {opt, [&var](const json& j) { var = j.get<bool>(); }};
    return opt;
  }

  bool given(const std::string& key) const {
    const auto it = setters_.find(key);
    return it != setters_.end() && (it->second.first->count() > 0 || from_config_.count(key) > 0);
  }

  /// Fills every key not given on the command line from the config file.
  void apply_config() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw IoError("cannot open config '" + config_path_ + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError("config '" + config_path_ + "': " + e.what(), 0);
    }
    if (!doc.is_object()) throw ParseError("config '" + config_path_ + "' must be a JSON object", 0);
    for (const auto& [key, value] : doc.items()) {
      if (key == "command") {
        if (value != app_->get_name()) throw DomainError("config is for command '" + value.dump() + "'");
        continue;
      }
      const auto it = setters_.find(key);
      if (it == setters_.end()) throw DomainError("unknown config key '" + key + "'");
      if (it->second.first->count() > 0) continue;
      try {
        it->second.second(value);
      } catch (const json::exception&) {
        throw DomainError("config key '" + key + "' has the wrong type");
      }
      from_config_.insert(key);
    }
  }

  const std::string& config_path() const { return config_path_; }

 private:
  static std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
  }

  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::pair<CLI::Option*, std::function<void(const json&)>>> setters_;
  std::set<std::string> from_config_;
};

// ---------------------------------------------------------------------------
// Output plumbing

struct Output {
  std::string out_dir;
  std::ostream* out;
  std::ostream* err;
  std::vector<std::string> written;
  std::vector<std::string> warnings;

  void warn(const std::string& text) {
    warnings.push_back(text);
    *err << "warning: " << text << '\n';
  }

  bool to_files() const { return !out_dir.empty(); }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / name).string();
    write_file_atomic(path, content);
    written.push_back(path);
  }
};

json input_record(const std::string& path) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  return {{"path", path}, {"bytes", ec ? json(nullptr) : json(size)}};
}

void write_manifest(Output& o, const std::string& command, const json& config, std::optional<std::uint64_t> seed,
                    const std::vector<std::string>& inputs, const json& notes = json::object()) {
  if (!o.to_files()) return;
  json in = json::array();
  for (const auto& p : inputs) in.push_back(input_record(p));
  json doc = {{"tool", "isothc"},
              {"version", ISOTHC_VERSION},
              {"command", command},
              {"config", config},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"inputs", in},
              {"outputs", o.written},
              {"warnings", o.warnings},
              {"notes", notes}};
  o.write("manifest.json", doc.dump(2) + "\n");
}

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw DomainError(what + " path is required");
  if (!fs::exists(path)) throw IoError(what + " '" + path + "' does not exist");
}

/// Runs tasks[i] on `jobs` workers; rethrows the first failure by index.
void run_pool(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// factorize

struct FactorizeOptions {
  std::string fcidump;
  std::vector<int> m;
  std::string factor_file;
  double delta = 0.2;
  int restarts = 10;
  std::uint64_t seed = 1;
  int rounds_phase1 = 1000;
  double lr_phase1 = 0.001;
  int rounds_phase2 = 1000;
  double lr_phase2 = 0.0005;
  double target_eps_v = 0.0;
  bool exact = false;
  int gauge_candidates = 64;
  bool no_rotate = false;
  int jobs = 1;
  std::string out_dir;

  json to_json() const {
    return {{"fcidump", fcidump},         {"m", m},
            {"factor_file", factor_file}, {"delta", delta},
            {"restarts", restarts},       {"seed", seed},
            {"rounds_phase1", rounds_phase1}, {"lr_phase1", lr_phase1},
            {"rounds_phase2", rounds_phase2}, {"lr_phase2", lr_phase2},
            {"target_eps_v", target_eps_v}, {"exact", exact},
            {"gauge_candidates", gauge_candidates}, {"no_rotate", no_rotate},
            {"jobs", jobs},               {"out_dir", out_dir}};
  }
};

void bind(Binder& b, FactorizeOptions& o) {
  b.option("fcidump", o.fcidump, "FCIDUMP integrals");
  b.option("m", o.m, "THC rank(s); several values run a sweep");
  b.option("factor_file", o.factor_file, "generic THC factor X (JSON or whitespace matrix) to isometrize");
  b.option("delta", o.delta, "lower bound on the isometrization weights");
  b.option("restarts", o.restarts, "random restarts per rank");
  b.option("seed", o.seed, "random seed");
  b.option("rounds_phase1", o.rounds_phase1, "Adam rounds, phase 1");
  b.option("lr_phase1", o.lr_phase1, "Adam learning rate, phase 1");
  b.option("rounds_phase2", o.rounds_phase2, "Adam rounds, phase 2");
  b.option("lr_phase2", o.lr_phase2, "Adam learning rate, phase 2");
  b.option("target_eps_v", o.target_eps_v, "stop restarting once eps_v reaches this value");
  b.flag("exact", o.exact, "exact factorization at M = N(N+1)/2 or M = N^2");
  b.option("gauge_candidates", o.gauge_candidates, "exact gauges tried; the smallest kernel norm is kept");
  b.flag("no_rotate", o.no_rotate, "keep the FCIDUMP orbitals instead of the h eigenbasis");
  b.option("jobs", o.jobs, "worker threads for rank sweeps");
  b.option("out_dir", o.out_dir, "output directory (stdout when omitted)");
}

struct FactorizeRow {
  int m = 0;
  std::optional<ThcFactorization> thc;
  double eps_v = 0.0;
  std::optional<double> eps_h;
  double l1_vtilde = 0.0;
  double wall_time = 0.0;
};

int cmd_factorize(const FactorizeOptions& o, Output& out) {
  require_file(o.fcidump, "FCIDUMP");
  if (!o.factor_file.empty()) require_file(o.factor_file, "factor file");
  if (o.jobs < 1) throw DomainError("jobs must be >= 1");
  const ElectronicHamiltonian raw = read_fcidump(o.fcidump);
  const ElectronicHamiltonian h = o.no_rotate ? raw : rotate_to_h_eigenbasis(raw).hamiltonian;
  const int n = h.n_orbitals();

  RefineConfig cfg;
  cfg.rounds_phase1 = o.rounds_phase1;
  cfg.lr_phase1 = o.lr_phase1;
  cfg.rounds_phase2 = o.rounds_phase2;
  cfg.lr_phase2 = o.lr_phase2;
  cfg.seed = o.seed;
  cfg.validate();
  if (o.restarts < 1) throw DomainError("restarts must be >= 1");

  std::optional<ThcFactorFile> factor;
  if (!o.factor_file.empty()) {
    if (o.exact) throw DomainError("--exact and --factor-file are exclusive");
    factor = read_factor_file(o.factor_file);
    if (factor->x.rows() != n) throw DomainError("factor file rows do not match the orbital count");
  }

  std::vector<int> ranks = o.m;
  if (ranks.empty()) {
    if (factor) ranks = {static_cast<int>(factor->x.cols())};
    else if (o.exact) ranks = {n * (n + 1) / 2};
    else throw DomainError("give --m (or --exact, or a factor file)");
  }
  for (int m : ranks) {
    if (m < n) throw DomainError("M = " + std::to_string(m) + " is below N = " + std::to_string(n));
    if (factor && m != factor->x.cols()) throw DomainError("M must equal the factor file's column count");
    if (o.exact && m != n * (n + 1) / 2 && m != n * n)
      throw DomainError("exact factorization needs M = N(N+1)/2 or M = N^2");
  }

  const std::string basis = o.no_rotate ? "input" : "h_eigenbasis";
  std::vector<FactorizeRow> rows(ranks.size());
  std::mutex warn_mutex;
  run_pool(ranks.size(), o.jobs, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    const int m = ranks[i];
    json method;
    ThcFactorization thc = [&] {
      if (o.exact) {
        ExactFactorizeOptions eo;
        eo.compress_to_rank = m != n * n;
        eo.seed = o.seed;
        eo.gauge_candidates = o.gauge_candidates;
        method = {{"method", "exact"}};
        return exact_factorize(h, eo).thc;
      }
      if (factor) {
        IsometrizeConfig ic;
        ic.delta = o.delta;
        const IsometrizeResult iso = isometrize(*factor, ic, &h);
        if (iso.warning) {
          std::lock_guard<std::mutex> lock(warn_mutex);
          out.warn(*iso.warning);
        }
        method = {{"method", "isometrize+refine"}, {"isometrize_residual", iso.residual}};
        return refine(iso.thc, h, cfg).thc;
      }
      const RestartResult r = refine_with_restarts(h, m, cfg, o.restarts, o.target_eps_v);
      method = {{"method", "restarts+refine"}, {"restarts_run", r.restarts_run}, {"best_restart", r.best_restart}};
      return r.best.thc;
    }();
    const ApproximationErrors e = approximation_errors(thc, h);
    ThcProvenance p;
    p.eps_v = e.eps_v;
    p.eps_h = e.eps_h;
    p.seed = o.seed;
    p.config = cfg.to_json();
    p.config["basis"] = basis;
    p.config.update(method);
    FactorizeRow& row = rows[i];
    row.thc = thc.with_provenance(p);
    row.m = thc.m();
    row.eps_v = e.eps_v;
    row.eps_h = e.eps_h;
    row.l1_vtilde = thc.vtilde().cwiseAbs().sum();
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  CsvTable table;
  table.header = {"m", "eps_v", "eps_h", "l1_vtilde", "wall_time_s"};
  for (const auto& r : rows) {
    table.rows.push_back({std::to_string(r.m), format_number(r.eps_v), r.eps_h ? format_number(*r.eps_h) : "",
                          format_number(r.l1_vtilde), format_number(r.wall_time)});
  }
  const std::string csv = format_csv(table);
  if (!out.to_files()) {
    *out.out << csv;
    if (rows.size() == 1) *out.out << to_json(*rows.front().thc).dump(2) << '\n';
    return kSuccess;
  }
  for (const auto& r : rows) out.write("thc_m" + std::to_string(r.m) + ".json", to_json(*r.thc).dump(2) + "\n");
  out.write("metrics.csv", csv);
  std::vector<std::string> inputs = {o.fcidump};
  if (!o.factor_file.empty()) inputs.push_back(o.factor_file);
  write_manifest(out, "factorize", o.to_json(), o.seed, inputs, {{"basis", basis}});
  for (const auto& p : out.written) *out.out << "wrote " << p << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string fcidump;
  std::string thc;
  std::vector<double> tau;
  double t = 1.0;
  std::vector<std::string> variants = {"basic", "improved"};
  std::string initial = "hartree_fock";
  int n_electrons = -1;
  int ms2 = 0;
  bool spinful = false;
  double step_tolerance = 1e-6;
  std::string path = "fused";
  int gauge_candidates = 1024;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir;

  json to_json() const {
    return {{"fcidump", fcidump},   {"thc", thc},
            {"tau", tau},           {"t", t},
            {"variants", variants}, {"initial", initial},
            {"n_electrons", n_electrons}, {"ms2", ms2},
            {"spinful", spinful},   {"step_tolerance", step_tolerance},
            {"path", path},         {"gauge_candidates", gauge_candidates},
            {"seed", seed},         {"jobs", jobs},
            {"out_dir", out_dir}};
  }
};

void bind(Binder& b, SimulateOptions& o) {
  b.option("fcidump", o.fcidump, "FCIDUMP integrals");
  b.option("thc", o.thc, "factorization JSON in the h eigenbasis (exact factorization when omitted)");
  b.option("tau", o.tau, "time steps");
  b.option("t", o.t, "total evolution time");
  b.option("variants", o.variants, "basic and/or improved");
  b.option("initial", o.initial, "hartree_fock, or an occupation string with character k for mode k");
  b.option("n_electrons", o.n_electrons, "electron count (defaults to the FCIDUMP NELEC)");
  b.option("ms2", o.ms2, "2 S_z of the Hartree-Fock state");
  b.flag("spinful", o.spinful, "simulate spin orbitals (2N system modes)");
  b.option("step_tolerance", o.step_tolerance, "allowed |t/tau - round(t/tau)|");
  b.option("path", o.path, "fused or reference circuit path");
  b.option("gauge_candidates", o.gauge_candidates, "exact gauges tried when no THC file is given");
  b.option("seed", o.seed, "seed for the exact factorization gauge");
  b.option("jobs", o.jobs, "worker threads over (variant, tau)");
  b.option("out_dir", o.out_dir, "output directory (stdout when omitted)");
}

FockState initial_state(const SimulateOptions& o, const ElectronicHamiltonian& h) {
  const ModeLayout sys{h.n_orbitals(), 0, o.spinful};
  if (o.initial == "hartree_fock") {
    int electrons = o.n_electrons;
    if (electrons < 0) {
      if (!h.metadata().n_electrons) throw DomainError("electron count unknown; pass --n-electrons");
      electrons = *h.metadata().n_electrons;
    }
    if (!o.spinful && electrons > h.n_orbitals()) {
      throw DomainError("spinless Hartree-Fock needs n_electrons <= N; pass --spinful or --n-electrons");
    }
    return hartree_fock_state(h.n_orbitals(), electrons, o.spinful, o.ms2);
  }
  if (static_cast<int>(o.initial.size()) != sys.n_modes() ||
      o.initial.find_first_not_of("01") != std::string::npos) {
    throw DomainError("initial state '" + o.initial + "' must be hartree_fock or a 0/1 string of length " +
                      std::to_string(sys.n_modes()));
  }
  fock::BasisIndex x = 0;
  for (int k = 0; k < sys.n_modes(); ++k)
    if (o.initial[static_cast<std::size_t>(k)] == '1') x |= fock::BasisIndex{1} << k;
  return FockState::basis_state(sys, x);
}

std::vector<double> deduplicated_taus(const std::vector<double>& taus, Output& out) {
  std::vector<double> kept;
  for (double tau : taus) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau values must be positive");
    const bool seen = std::any_of(kept.begin(), kept.end(),
                                  [&](double k) { return std::abs(k - tau) <= 1e-12 * std::max(k, tau); });
    if (seen) {
      out.warn("duplicate tau " + format_number(tau) + " dropped");
      continue;
    }
    kept.push_back(tau);
  }
  return kept;
}

int cmd_simulate(const SimulateOptions& o, Output& out) {
  require_file(o.fcidump, "FCIDUMP");
  if (!o.thc.empty()) require_file(o.thc, "THC file");
  if (o.jobs < 1) throw DomainError("jobs must be >= 1");
  if (!(o.t >= 0.0)) throw DomainError("t must be >= 0");
  if (o.tau.empty()) throw DomainError("give at least one --tau");
  const std::vector<double> taus = deduplicated_taus(o.tau, out);
  std::vector<Variant> variants;
  for (const auto& v : o.variants) variants.push_back(parse_variant(v));
  if (variants.empty()) throw DomainError("give at least one variant");
  CircuitPath circuit_path;
  if (o.path == "fused") circuit_path = CircuitPath::fused;
  else if (o.path == "reference") circuit_path = CircuitPath::reference;
  else throw DomainError("path must be fused or reference");

  const ElectronicHamiltonian raw = read_fcidump(o.fcidump);
  ModeLayout::system_only(raw.n_orbitals(), o.spinful).validate(kDensityModeCap);
  const ElectronicHamiltonian h = rotate_to_h_eigenbasis(raw).hamiltonian;
  std::string thc_source = "exact";
  ThcFactorization thc = [&] {
    if (o.thc.empty()) {
      ExactFactorizeOptions eo;
      eo.seed = o.seed;
      eo.gauge_candidates = o.gauge_candidates;
      return exact_factorize(h, eo).thc;
    }
    thc_source = o.thc;
    return read_thc(o.thc);
  }();
  if (thc.n() != h.n_orbitals()) throw DomainError("THC orbital count does not match the FCIDUMP");
  const auto& cfg = thc.provenance().config;
  if (!o.thc.empty() && cfg.value("basis", std::string("h_eigenbasis")) != "h_eigenbasis") {
    out.warn("THC file was not built in the h eigenbasis");
  }

  // Size checks before any run starts.
  ModeLayout{thc.n(), thc.m() - thc.n(), o.spinful}.validate(kDensityModeCap);
  const FockState psi0 = initial_state(o, h);
  for (double tau : taus) step_count(o.t, tau, o.step_tolerance);

  struct Run {
    Variant variant;
    double tau;
    int steps = 0;
    double error = 0.0;
  };
  std::vector<Run> runs;
  for (Variant v : variants)
    for (double tau : taus) runs.push_back({v, tau});
  EvolveOptions eo;
  eo.step_tolerance = o.step_tolerance;
  eo.path = circuit_path;
  run_pool(runs.size(), o.jobs, [&](std::size_t i) {
    const EvolveResult r = evolve(psi0, thc, h, o.t, {runs[i].variant, runs[i].tau}, eo);
    runs[i].steps = r.steps;
    runs[i].error = r.error_vs_exact;
  });

  CsvTable table;
  table.header = {"variant", "tau", "steps", "error"};
  for (const auto& r : runs)
    table.rows.push_back({to_string(r.variant), format_number(r.tau), std::to_string(r.steps), format_number(r.error)});
  json fits = json::object();
  for (Variant v : variants) {
    std::vector<double> x, y;
    for (const auto& r : runs)
      if (r.variant == v && r.error > 0.0) {
        x.push_back(r.tau);
        y.push_back(r.error);
      }
    if (x.size() < 2) {
      fits[to_string(v)] = nullptr;
      continue;
    }
    const FitResult f = fit_loglog(x, y);
    fits[to_string(v)] = {{"slope", f.slope},
                          {"intercept", f.intercept},
                          {"r_squared", f.r_squared},
                          {"points_used", f.points_used}};
  }
  const json summary = {{"t", o.t},
                        {"spinful", o.spinful},
                        {"m", thc.m()},
                        {"thc", thc_source},
                        {"initial", o.initial},
                        {"fits", fits},
                        {"warnings", out.warnings}};
  const std::string csv = format_csv(table);
  if (!out.to_files()) {
    *out.out << csv << summary.dump(2) << '\n';
    return kSuccess;
  }
  out.write("simulate.csv", csv);
  out.write("summary.json", summary.dump(2) + "\n");
  std::vector<std::string> inputs = {o.fcidump};
  if (!o.thc.empty()) inputs.push_back(o.thc);
  write_manifest(out, "simulate", o.to_json(), o.seed, inputs,
                 {{"initial_state", o.initial == "hartree_fock"
                                        ? "lowest h-eigenbasis occupation"
                                        : "explicit occupation string"}});
  for (const auto& p : out.written) *out.out << "wrote " << p << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
  int n = 76;
  int m = 450;
  bool spinless = false;
  std::string architecture = "all_to_all";
  int motta_l = 0;
  int motta_xi = 0;
  bool femoco = false;
  double eps_rot = 0.0;
  std::string out_dir;

  json to_json() const {
    return {{"n", n},           {"m", m},         {"spinless", spinless}, {"architecture", architecture},
            {"motta_l", motta_l}, {"motta_xi", motta_xi}, {"femoco", femoco}, {"eps_rot", eps_rot},
            {"out_dir", out_dir}};
  }
};

void bind(Binder& b, EstimateOptions& o) {
  b.option("n", o.n, "spatial orbitals N");
  b.option("m", o.m, "THC rank M");
  b.flag("spinless", o.spinless, "count spinless modes");
  b.option("architecture", o.architecture, "all_to_all or linear");
  b.option("motta_l", o.motta_l, "baseline first-factorization rank L");
  b.option("motta_xi", o.motta_xi, "baseline average second rank Xi");
  b.flag("femoco", o.femoco, "FeMoco parameters: N=76, M=450, L=394, Xi=51");
  b.option("eps_rot", o.eps_rot, "rotation synthesis precision for T counts");
  b.option("out_dir", o.out_dir, "output directory (stdout when omitted)");
}

int cmd_estimate(EstimateOptions o, const Binder& b, Output& out) {
  if (o.femoco) {
    if (!b.given("n")) o.n = 76;
    if (!b.given("m")) o.m = 450;
    if (!b.given("motta_l")) o.motta_l = 394;
    if (!b.given("motta_xi")) o.motta_xi = 51;
  }
  if ((o.motta_l > 0) != (o.motta_xi > 0)) throw DomainError("give both --motta-l and --motta-xi");
  const std::optional<double> eps = o.eps_rot > 0.0 ? std::optional<double>(o.eps_rot) : std::nullopt;
  const ResourceReport ours = estimate_step(o.n, o.m, !o.spinless, parse_architecture(o.architecture), eps);
  std::optional<ResourceReport> baseline;
  if (o.motta_l > 0) baseline = motta_estimate({o.n, o.motta_l, o.motta_xi}, eps);
  const std::string table = render_table(ours, baseline);
  json report = {{"ours", ours.to_json()}};
  if (baseline) {
    const ResourceRatios r = ratios(*baseline, ours);
    report["baseline"] = baseline->to_json();
    report["ratios"] = {{"rotations", r.rotations}, {"depth", r.depth}};
  }
  if (!out.to_files()) {
    *out.out << table;
    return kSuccess;
  }
  out.write("table.txt", table);
  out.write("report.json", report.dump(2) + "\n");
  write_manifest(out, "estimate", o.to_json(), std::nullopt, {});
  *out.out << table;
  return kSuccess;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string csv;
  std::string x;
  std::string y;
  int k_last = 0;
  std::string out_dir;

  json to_json() const { return {{"csv", csv}, {"x", x}, {"y", y}, {"k_last", k_last}, {"out_dir", out_dir}}; }
};

void bind(Binder& b, FitOptions& o) {
  b.option("csv", o.csv, "series CSV with a header row");
  b.option("x", o.x, "x column name (first column when omitted)");
  b.option("y", o.y, "y column name (second column when omitted)");
  b.option("k_last", o.k_last, "fit the k points with the largest x (0 = all)");
  b.option("out_dir", o.out_dir, "output directory (stdout when omitted)");
}

int cmd_fit(const FitOptions& o, Output& out) {
  require_file(o.csv, "series CSV");
  std::ifstream in(o.csv);
  if (!in) throw IoError("cannot open '" + o.csv + "'");
  const Series s = read_series_csv(in, o.x, o.y);
  const FitResult f = fit_loglog(s.x, s.y, o.k_last);
  const json doc = {{"slope", f.slope},
                    {"intercept", f.intercept},
                    {"points_used", f.points_used},
                    {"r_squared", f.r_squared}};
  if (!out.to_files()) {
    *out.out << doc.dump(2) << '\n';
    return kSuccess;
  }
  out.write("fit.json", doc.dump(2) + "\n");
  write_manifest(out, "fit", o.to_json(), std::nullopt, {o.csv});
  *out.out << doc.dump(2) << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isometric THC Hamiltonian simulation toolkit", "isothc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ISOTHC_VERSION);

  CLI::App* factorize = app.add_subcommand("factorize", "isometric THC factorization of an FCIDUMP");
  CLI::App* simulate = app.add_subcommand("simulate", "Trotter evolution against exact dynamics");
  CLI::App* estimate = app.add_subcommand("estimate", "per-step fault-tolerant resource counts");
  CLI::App* fit = app.add_subcommand("fit", "log-log least-squares slope of a CSV series");

  FactorizeOptions fo;
  SimulateOptions so;
  EstimateOptions eo;
  FitOptions ito;
  Binder fb(factorize), sb(simulate), eb(estimate), tb(fit);
  bind(fb, fo);
  bind(sb, so);
  bind(eb, eo);
  bind(tb, ito);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kDomainError;
  }

  try {
    auto output = [&](const std::string& dir) { return Output{dir, &out, &err, {}, {}}; };
    if (*factorize) {
      fb.apply_config();
      Output o = output(fo.out_dir);
      return cmd_factorize(fo, o);
    }
    if (*simulate) {
      sb.apply_config();
      Output o = output(so.out_dir);
      return cmd_simulate(so, o);
    }
    if (*estimate) {
      eb.apply_config();
      Output o = output(eo.out_dir);
      return cmd_estimate(eo, eb, o);
    }
    tb.apply_config();
    Output o = output(ito.out_dir);
    return cmd_fit(ito, o);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
}

}  // namespace isothc::cli
