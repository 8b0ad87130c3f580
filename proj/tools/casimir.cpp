// casimir: sweeps, single-point evaluation, oracle comparison and figure presets.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "casimir/oracles.hpp"
#include "casimir/sweep.hpp"

#ifndef CASIMIR_PRESET_DIR
#define CASIMIR_PRESET_DIR "presets"
#endif

namespace {

using namespace casimir;

constexpr int kExitPointFailure = 1;
constexpr int kExitUsage = 2;

// Flag name -> SweepSpec field.
const std::pair<const char*, const char*> kSweepFlags[] = {
    {"--mass", "mass"},
    {"--mu", "mu"},
    {"--mu2", "mu2"},
    {"--degeneracy", "degeneracy"},
    {"--temperature", "temperature"},
    {"--bc", "bc"},
    {"--dim", "dim"},
    {"--lz-min", "lz_min"},
    {"--lz-max", "lz_max"},
    {"--lz-points", "lz_points"},
    {"--lz-scale", "lz_scale"},
    {"--quantities", "quantities"},
    {"--area", "area"},
    {"--rel-tol", "rel_tol"},
    {"--abs-tol", "abs_tol"},
    {"--workers", "workers"},
    {"--output", "output"},
    {"--format", "format"},
};

struct Overrides {
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    for (const auto& [flag, key] : kSweepFlags) {
      const std::string k = key;
      app->add_option_function<std::string>(flag, [this, k](const std::string& v) { values[k] = v; },
                                            std::string("sets ") + key);
    }
  }

  void apply(SweepSpec& s) const {
    for (const auto& [k, v] : values) apply_setting(s, k, v);
  }
};

void load_config(SweepSpec& s, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot read config " + path.string());
  apply_config(s, in);
}

template <class Write>
void with_output(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path);
  write(out);
  if (!out) throw Error(Errc::IoFailure, "write to " + path + " failed");
}

int report(const SweepTable& t) {
  const auto failed = t.failures();
  if (failed.empty()) return 0;
  std::cerr << failed.size() << " of " << t.rows.size() << " points failed\n";
  for (const Record* r : failed) {
    const auto& c = t.configs[r->config];
    std::cerr << "  lz=" << r->lz << " mass=" << c.mass << " mu=" << c.mu << " T=" << c.temperature
              << " d=" << c.dim << ": " << (r->failure.empty() ? "not converged" : r->failure) << '\n';
  }
  return kExitPointFailure;
}

int run_and_emit(const SweepSpec& spec) {
  const SweepTable t = run_sweep(spec);
  with_output(spec.output, [&](std::ostream& os) { emit(t, spec.format, os); });
  return report(t);
}

int run_eval(SweepSpec spec, double lz) {
  validate_separation(lz);
  spec.lz_min = lz;
  spec.lz_max = 2.0 * lz;  // only to pass validation; the grid is not used
  validate(spec);
  SweepTable t;
  t.spec = spec;
  t.configs = configurations(spec);
  for (std::size_t c = 0; c < t.configs.size(); ++c) {
    Record r = detail::evaluate_point(spec, t.configs[c], lz);
    r.config = c;
    t.rows.push_back(std::move(r));
  }
  with_output(spec.output, [&](std::ostream& os) { emit(t, spec.format, os); });
  return report(t);
}

int run_oracle(const SweepSpec& spec, double spacing, double wilson_r) {
  validate(spec);
  const Tolerances tol{spec.rel_tol, spec.abs_tol};
  bool bad = false;
  CsvTable out;
  out.header = {"lz", "lifshitz_fermi", "fermi_oracle", "fermi_rel"};
  const bool lattice = spacing > 0.0;
  if (lattice) {
    if (spec.bc != BoundaryKind::PBC) throw Error(Errc::InvalidLattice, "the lattice oracle is periodic only");
    out.header.insert(out.header.end(), {"lifshitz_energy", "lattice", "lattice_rel"});
  }
  for (const auto& c : configurations(spec)) {
    const FieldSpec f{c.mass, c.mu, spec.degeneracy};
    for (double lz : lz_grid(spec)) {
      std::vector<double> row{lz};
      const SeaSplit s = sea_split(f, spec.bc, c.dim, lz, 0.0, tol);
      const double o = fermi_sea_oracle({f, spec.bc, c.dim, lz});
      bad = bad || !s.converged;
      row.insert(row.end(), {s.fermi, o, o == 0.0 ? std::abs(s.fermi) : std::abs(s.fermi - o) / std::abs(o)});
      if (lattice) {
        const int sites = static_cast<int>(std::lround(lz / spacing));
        const LatticeResult l = lattice_oracle({f, std::max(sites, 2), spacing, wilson_r, c.dim});
        const EvalResult e = casimir_energy_T0(f, spec.bc, c.dim, sites * spacing, tol);
        bad = bad || !l.converged || !e.converged;
        row.insert(row.end(), {e.value, l.value, std::abs(l.value - e.value) / std::abs(e.value)});
      }
      out.rows.push_back(std::move(row));
    }
  }
  with_output(spec.output, [&](std::ostream& os) { write_csv(out, os); });
  if (bad) std::cerr << "some evaluations did not converge\n";
  return bad ? kExitPointFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir energy of Dirac fields at finite density: sweeps and checks"};
  app.require_subcommand(1);

  std::string config;
  double lz = 1.0, spacing = 0.0, wilson_r = 1.0;
  std::string preset, preset_dir = CASIMIR_PRESET_DIR;

  Overrides sweep_o, eval_o, oracle_o, preset_o;
  auto* sweep = app.add_subcommand("sweep", "evaluate quantities over a grid of separations");
  sweep->add_option("--config", config, "flat key = value file")->check(CLI::ExistingFile);
  sweep_o.attach(sweep);

  auto* eval = app.add_subcommand("eval", "evaluate one separation");
  eval->add_option("--config", config, "flat key = value file")->check(CLI::ExistingFile);
  eval->add_option("--lz", lz, "separation")->required();
  eval_o.attach(eval);

  auto* oracle = app.add_subcommand("oracle", "compare against the Fermi-sea and lattice mode sums");
  oracle->add_option("--config", config, "flat key = value file")->check(CLI::ExistingFile);
  oracle->add_option("--spacing", spacing, "lattice spacing; 0 skips the lattice comparison");
  oracle->add_option("--wilson-r", wilson_r, "Wilson parameter of the lattice oracle");
  oracle_o.attach(oracle);

  auto* pre = app.add_subcommand("preset", "run a bundled figure preset");
  pre->add_option("name", preset, "fig1 ... fig6")->required();
  pre->add_option("--preset-dir", preset_dir, "directory holding <name>.conf");
  preset_o.attach(pre);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    SweepSpec spec;
    if (*pre) {
      load_config(spec, std::filesystem::path(preset_dir) / (preset + ".conf"));
      preset_o.apply(spec);
      return run_and_emit(spec);
    }
    if (!config.empty()) load_config(spec, config);
    if (*sweep) {
      sweep_o.apply(spec);
      return run_and_emit(spec);
    }
    if (*eval) {
      eval_o.apply(spec);
      return run_eval(spec, lz);
    }
    oracle_o.apply(spec);
    return run_oracle(spec, spacing, wilson_r);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::IoFailure ? kExitPointFailure : kExitUsage;
  }
}
