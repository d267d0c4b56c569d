// plcsynth: generate, characterize and validate MIMO power-line channels.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "plcsynth/atomic_file.hpp"
#include "plcsynth/capacity.hpp"
#include "plcsynth/channel_file.hpp"
#include "plcsynth/characterization.hpp"
#include "plcsynth/generator.hpp"
#include "plcsynth/matrix_file.hpp"
#include "plcsynth/metrics.hpp"
#include "plcsynth/parameter_file.hpp"
#include "plcsynth/sqrt_cache.hpp"
#include "plcsynth/validation.hpp"

namespace fs = std::filesystem;
using namespace plcsynth;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kParameters = 3,
  kNumerical = 4,
  kInsufficient = 5,
  kValidation = 6,
};

constexpr const char* kParamsEnv = "PLCSYNTH_PARAMS";

// Anything wrong with a parameter, noise, mask or target file.
struct ConfigFileError : Error {
  using Error::Error;
};

template <class F>
auto load_config(const fs::path& path, F&& parse) {
  try {
    return parse(read_text_file(path));
  } catch (const Error& ex) {
    throw ConfigFileError(path.string() + ": " + ex.what());
  }
}

std::string repair_summary(const PsdRepairReport& r) {
  std::ostringstream s;
  s << "min eigenvalue " << r.min_eigenvalue_before << ", " << r.n_clamped
    << " eigenvalues clamped, relative Frobenius change " << r.frobenius_change;
  return s.str();
}

struct GenerateFlags {
  std::optional<fs::path> params;
  std::string scheme = "2x3";
  std::size_t n = 1;
  std::uint64_t seed = 0;
  std::size_t decimate = 1;
  std::string mode = "synthetic";
  std::optional<fs::path> copula_matrices;
  bool exp_refinement = false;
  std::optional<fs::path> cache_dir;
};

CLI::Option* add_generation_options(CLI::App* cmd, GenerateFlags& g, bool required) {
  cmd->add_option("--params", g.params, std::string("Parameter file (default: $") + kParamsEnv +
                                            ", else the published coefficients)");
  cmd->add_option("--scheme", g.scheme, "Transmission scheme")
      ->check(CLI::IsMember({"siso", "2x2", "2x3"}));
  auto* n = cmd->add_option("--n", g.n, "Number of realizations")->check(CLI::PositiveNumber);
  if (required) n->required();
  cmd->add_option("--seed", g.seed, "Master seed");
  cmd->add_option("--decimate", g.decimate, "Keep every k-th frequency bin")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mode", g.mode, "Generation path")
      ->check(CLI::IsMember({"synthetic", "copula"}));
  cmd->add_option("--copula-matrices", g.copula_matrices,
                  "Empirical matrix file for --mode copula (from characterize --empirical-out)");
  cmd->add_flag("--exp-refinement", g.exp_refinement,
                "Use the exponential tail for common-mode anti-diagonals");
  cmd->add_option("--cache-dir", g.cache_dir, "Directory caching covariance square roots");
  return n;
}

ParameterFile load_parameters(const std::optional<fs::path>& flag) {
  std::optional<fs::path> path = flag;
  if (!path) {
    if (const char* env = std::getenv(kParamsEnv); env && *env) path = env;
  }
  if (!path) return ParameterFile{};
  return load_config(*path, [](const std::string& t) { return parse_parameter_file(t); });
}

ChannelSet run_generation(const GenerateFlags& g, std::size_t threads) {
  const ParameterFile file = load_parameters(g.params);
  GeneratorConfig config;
  config.n_realizations = g.n;
  config.seed = g.seed;
  config.scheme = parse_scheme(g.scheme);
  config.decimation = g.decimate;
  config.threads = threads;
  config.cache_dir = g.cache_dir;
  config.exponential_cm_refinement = g.exp_refinement;

  if (g.mode == "copula") {
    if (!g.copula_matrices) throw InvalidInput("--mode copula requires --copula-matrices");
    config.mode = GenerationMode::not_fully_synthetic;
    const EmpiricalMatrices m = read_matrix_file(*g.copula_matrices);
    PsdRepairReport amp, phase;
    ChannelSet set = generate_copula(config, m, &amp, &phase);
    if (amp.n_clamped) std::cerr << "note: amplitude covariance repaired (" << repair_summary(amp) << ")\n";
    if (phase.n_clamped) std::cerr << "note: phase correlation repaired (" << repair_summary(phase) << ")\n";
    return set;
  }

  MimoGrid grid = generation_grid(config);
  if (file.grid) {
    try {
      grid = file.grid->subset(grid.tx_modes(), grid.rx_modes()).decimated(g.decimate);
    } catch (const InvalidInput& ex) {
      throw ConfigFileError(std::string("parameter file grid: ") + ex.what());
    }
  }
  const PsdSqrt root = amplitude_covariance_sqrt(file.params, grid, g.exp_refinement, g.cache_dir);
  if (root.report.n_clamped) {
    std::cerr << "note: amplitude covariance repaired (" << repair_summary(root.report) << ")\n";
  }
  return generate(config, file.params, grid, root.root);
}

// ---- generate ----

int cmd_generate(const GenerateFlags& g, const fs::path& out, std::size_t threads) {
  const ChannelSet set = run_generation(g, threads);
  write_channel_file(out, set);
  return kOk;
}

// ---- characterize ----

void put_diagnostics(std::ostream& out, const std::string& key, const FitDiagnostics& d) {
  out << key << ".converged=" << (d.converged ? 1 : 0) << "\n";
  out << key << ".iterations=" << d.iterations << "\n";
  out << key << ".residual_norm=" << format_exact(d.residual_norm) << "\n";
  for (std::size_t k = 0; k < d.estimates.size(); ++k) {
    out << key << ".estimate" << k << "=" << format_exact(d.estimates[k]) << "\n";
  }
  for (std::size_t k = 0; k < d.standard_errors.size(); ++k) {
    out << key << ".stderr" << k << "=" << format_exact(d.standard_errors[k]) << "\n";
  }
  if (!d.note.empty()) out << key << ".note=" << d.note << "\n";
}

struct CharacterizeFlags {
  fs::path in;
  fs::path out;
  std::optional<fs::path> diagnostics;
  std::optional<fs::path> empirical_out;
  bool robust_phase = false;
  bool no_exp_tail = false;
  double power_lag_cap_mhz = 40.0;
};

int cmd_characterize(const CharacterizeFlags& f) {
  const ChannelSet set = read_channel_file(f.in);
  if (set.size() < 2) {
    throw InsufficientData("characterize needs at least 2 realizations, got " + std::to_string(set.size()));
  }
  CharacterizationOptions opts;
  opts.robust_phase_slope = f.robust_phase;
  opts.fit_exponential_tail = !f.no_exp_tail;
  opts.power_window.lag_cap_hz = f.power_lag_cap_mhz * 1e6;
  const CharacterizationResult r = characterize(set, opts);

  ParameterFile file;
  file.params = r.params;
  file.has_refinement = r.has_cm && opts.fit_exponential_tail;
  file.grid = set.grid;
  write_parameter_file(f.out, file);

  const fs::path diag = f.diagnostics ? *f.diagnostics : fs::path(f.out.string() + ".diagnostics");
  write_atomically(diag, [&](std::ostream& out) {
    out << "n_realizations=" << r.n_realizations << "\n";
    put_diagnostics(out, "mu", r.mu_fit);
    put_diagnostics(out, "sigma_nocm", r.sigma_nocm_fit);
    put_diagnostics(out, "sigma_cm", r.sigma_cm_fit);
    put_diagnostics(out, "antidiag_nocm", r.power_nocm_fit);
    put_diagnostics(out, "antidiag_cm_power", r.power_cm_fit);
    put_diagnostics(out, "antidiag_cm_exp", r.exp_cm_fit);
    put_diagnostics(out, "gev", r.gev_fit);
  });
  if (f.empirical_out) write_matrix_file(*f.empirical_out, empirical_matrices(set));
  return kOk;
}

// ---- metrics ----

int cmd_metrics(const fs::path& in, const fs::path& out, std::size_t threads) {
  const ChannelSet set = read_channel_file(in);
  const auto metrics = compute_metrics(set, threads);
  const auto combos = set.grid.combinations();
  write_atomically(out, [&](std::ostream& os) {
    os << "realization_id,tx_mode,rx_mode,acg_db,rms_ds_us,cb_khz,kappa_db\n";
    for (std::size_t r = 0; r < metrics.size(); ++r) {
      const RealizationMetrics& m = metrics[r];
      for (std::size_t k = 0; k < combos.size(); ++k) {
        os << r << ',' << combos[k].tx << ',' << combos[k].rx << ',' << format_exact(m.acg_db[k])
           << ',' << format_exact(m.rms_ds_s[k] * 1e6) << ',' << format_exact(m.cb_hz[k] * 1e-3)
           << ',' << (m.has_kappa ? format_exact(m.kappa.mean_db) : "") << '\n';
      }
    }
  });
  const MetricsSummary s = summarize(metrics);
  std::cout << "realizations " << s.n_realizations << "\n"
            << "acg_db mean " << s.acg_db.mean << " std " << s.acg_db.std << "\n"
            << "rms_ds_us mean " << s.rms_ds_us.mean << " std " << s.rms_ds_us.std << "\n"
            << "cb_khz mean " << s.cb_khz.mean << " std " << s.cb_khz.std << "\n";
  if (s.kappa_db.available) {
    std::cout << "kappa_db mean " << s.kappa_db.mean << " std " << s.kappa_db.std << "\n";
  }
  return kOk;
}

// ---- capacity ----

struct NoiseFlags {
  std::optional<fs::path> noise;
  std::optional<fs::path> mask;
};

void add_noise_options(CLI::App* cmd, NoiseFlags& n) {
  cmd->add_option("--noise", n.noise, "Noise model file (noise.* keys)");
  cmd->add_option("--mask", n.mask, "PSD mask file (mask key)");
}

std::pair<NoiseModel, PsdMask> load_noise(const NoiseFlags& n) {
  NoiseModel noise;
  PsdMask mask;
  if (n.noise) noise = load_config(*n.noise, [](const std::string& t) { return parse_noise_model(t); });
  if (n.mask) mask = load_config(*n.mask, [](const std::string& t) { return parse_psd_mask(t); });
  return {noise, mask};
}

int cmd_capacity(const fs::path& in, const fs::path& out, const std::optional<fs::path>& per_real,
                 const NoiseFlags& nf, std::size_t threads) {
  const auto [noise, mask] = load_noise(nf);
  const ChannelSet set = read_channel_file(in);
  const CapacityResult c = capacity_ccdf(set, noise, mask, threads);
  write_atomically(out, [&](std::ostream& os) {
    os << "rate_bps,ccdf\n";
    for (const auto& [rate, p] : c.ccdf) os << format_exact(rate) << ',' << format_exact(p) << '\n';
  });
  if (per_real) {
    write_atomically(*per_real, [&](std::ostream& os) {
      os << "realization_id,capacity_bps\n";
      for (std::size_t r = 0; r < c.per_realization_bps.size(); ++r) {
        os << r << ',' << format_exact(c.per_realization_bps[r]) << '\n';
      }
    });
  }
  return kOk;
}

// ---- validate ----

struct ValidateFlags {
  std::optional<fs::path> in;
  std::vector<std::string> targets{"table3-synthetic"};
  std::optional<fs::path> report;
  std::optional<fs::path> report_kv;
  bool capacity = false;
};

int cmd_validate(const ValidateFlags& v, const GenerateFlags& g, const NoiseFlags& nf,
                 std::size_t threads) {
  TargetSet targets;
  if (v.targets.front() == "custom") {
    if (v.targets.size() != 2) throw InvalidInput("--targets custom needs a file argument");
    targets = load_config(v.targets[1], [&](const std::string& t) {
      return TargetSet::parse("custom:" + v.targets[1], t);
    });
  } else {
    if (v.targets.size() != 1) throw InvalidInput("--targets takes one built-in name");
    targets = TargetSet::builtin(v.targets.front());
  }

  ReportStamp stamp;
  std::optional<ChannelSet> set;
  if (v.in) {
    set = read_channel_file(*v.in);
    stamp.source = v.in->string();
  } else {
    set = run_generation(g, threads);
    stamp.source = "generated";
    stamp.seed = g.seed;
    stamp.decimation = g.decimate;
  }
  if (set->empty()) throw InvalidInput("validate: empty input");
  const std::size_t n_rx = set->grid.n_rx(), n_tx = set->grid.n_tx();
  stamp.scheme = std::to_string(n_tx) + "x" + std::to_string(n_rx);
  stamp.n_freq = set->grid.n_freq();
  stamp.n_realizations = set->size();

  const auto metrics = compute_metrics(*set, threads);
  std::optional<CapacityResult> cap;
  if (v.capacity || nf.noise || nf.mask) {
    const auto [noise, mask] = load_noise(nf);
    cap = capacity_ccdf(*set, noise, mask, threads);
  }
  const MetricsSummary summary = summarize(metrics, cap ? &cap->per_realization_bps : nullptr);
  const ValidationReport report = validate_summary(summary, targets, stamp);

  const std::string text = report.text();
  std::cout << text;
  if (v.report) write_atomically(*v.report, [&](std::ostream& os) { os << text; });
  if (v.report_kv) write_atomically(*v.report_kv, [&](std::ostream& os) { os << report.key_values(); });
  return report.pass() ? kOk : kValidation;
}

int write_defaults(const fs::path& out, bool with_grid, bool with_noise) {
  ParameterFile file;
  file.has_refinement = true;
  if (with_grid) file.grid = MimoGrid::default_2x3();
  if (with_noise) {
    file.noise = NoiseModel{};
    file.mask = PsdMask{};
  }
  write_parameter_file(out, file);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical MIMO power-line channel generator"};
  app.require_subcommand(1);
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "Worker cap; results do not depend on it")
      ->check(CLI::PositiveNumber);

  GenerateFlags gen;
  fs::path gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a channel set");
  add_generation_options(generate_cmd, gen, true);
  generate_cmd->add_option("--out", gen_out, "Output channel file")->required();

  CharacterizeFlags ch;
  auto* char_cmd = app.add_subcommand("characterize", "Fit the compact model to a channel set");
  char_cmd->add_option("--in", ch.in, "Input channel file")->required();
  char_cmd->add_option("--out", ch.out, "Output parameter file")->required();
  char_cmd->add_option("--diagnostics", ch.diagnostics, "Fit diagnostics (default: <out>.diagnostics)");
  char_cmd->add_option("--empirical-out", ch.empirical_out,
                       "Also write the full empirical matrices for --mode copula");
  char_cmd->add_flag("--robust-phase", ch.robust_phase, "Robust line fit for phase slopes");
  char_cmd->add_flag("--no-exp-tail", ch.no_exp_tail, "Skip the exponential CM tail fit");
  char_cmd->add_option("--power-lag-cap-mhz", ch.power_lag_cap_mhz,
                       "Largest lag used by the anti-diagonal power fits")
      ->check(CLI::PositiveNumber);

  ValidateFlags val;
  GenerateFlags val_gen;
  NoiseFlags val_noise;
  auto* val_cmd = app.add_subcommand("validate", "Compare metric statistics with reference targets");
  auto* val_in = val_cmd->add_option("--in", val.in, "Channel file (otherwise generate with the flags below)");
  val_cmd->add_option("--targets", val.targets, "Built-in target name, or: custom <file>")
      ->expected(1, 2);
  val_cmd->add_option("--report", val.report, "Write the text report here");
  val_cmd->add_option("--report-kv", val.report_kv, "Write the key=value report here");
  val_cmd->add_flag("--capacity", val.capacity, "Include capacity with the default noise and mask");
  add_noise_options(val_cmd, val_noise);
  auto* val_n = add_generation_options(val_cmd, val_gen, false);
  val_n->excludes(val_in);

  fs::path met_in, met_out;
  auto* met_cmd = app.add_subcommand("metrics", "Per-realization metrics as CSV");
  met_cmd->add_option("--in", met_in, "Input channel file")->required();
  met_cmd->add_option("--out", met_out, "Output CSV")->required();

  fs::path cap_in, cap_out;
  std::optional<fs::path> cap_per;
  NoiseFlags cap_noise;
  auto* cap_cmd = app.add_subcommand("capacity", "Capacity CCDF as CSV");
  cap_cmd->add_option("--in", cap_in, "Input channel file")->required();
  cap_cmd->add_option("--out", cap_out, "Output CCDF CSV (rate_bps,ccdf)")->required();
  cap_cmd->add_option("--per-realization", cap_per, "Also write per-realization capacities");
  add_noise_options(cap_cmd, cap_noise);

  fs::path def_out;
  bool def_grid = false, def_noise = false;
  auto* def_cmd = app.add_subcommand("write-defaults", "Write the published parameters to a file");
  def_cmd->add_option("--out", def_out, "Output parameter file")->required();
  def_cmd->add_flag("--with-grid", def_grid, "Include the default 2x3 grid");
  def_cmd->add_flag("--with-noise", def_noise, "Include the default noise model and mask");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, gen_out, threads);
    if (*char_cmd) return cmd_characterize(ch);
    if (*val_cmd) {
      if (!val.in && val_n->count() == 0) throw InvalidInput("validate needs --in or generation flags");
      return cmd_validate(val, val_gen, val_noise, threads);
    }
    if (*met_cmd) return cmd_metrics(met_in, met_out, threads);
    if (*cap_cmd) return cmd_capacity(cap_in, cap_out, cap_per, cap_noise, threads);
    if (*def_cmd) return write_defaults(def_out, def_grid, def_noise);
  } catch (const ConfigFileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParameters;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParameters;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const InsufficientData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInsufficient;
  } catch (const Error& e) {
    // Malformed or empty input, bad flag combinations.
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
