// polargate: figure data and pulse optimization from the command line.
// Every frequency on the command line is in ordinary Hz.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polargate/analysis.hpp"
#include "polargate/csv.hpp"
#include "polargate/errors.hpp"
#include "polargate/grape.hpp"
#include "polargate/hamiltonian.hpp"
#include "polargate/motional.hpp"
#include "polargate/propagation.hpp"
#include "polargate/species.hpp"
#include "polargate/units.hpp"

namespace fs = std::filesystem;
using namespace polargate;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::vector<double> grid() const { return uniform_grid(lo, hi, step); }
};

// "lo:hi:step"
Range parse_range(const std::string& text, const char* what) {
  Range r;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.lo, &r.hi, &r.step, &tail) != 3) {
    throw ConfigError(std::string(what) + ": expected lo:hi:step, got '" + text + "'");
  }
  if (!(r.step > 0.0) || !(r.hi >= r.lo)) {
    throw ConfigError(std::string(what) + ": empty range '" + text + "'");
  }
  return r;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Resolved option values of a subcommand, for the manifest.
json resolved_options(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->get_expected_max() == 0) {
      j[name] = opt->count() > 0;
    } else if (!opt->results().empty()) {
      j[name] = opt->results().back();
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

// All subcommands share these.
struct Common {
  std::string out;
  std::uint64_t seed = 42;
  bool strict = false;
  int threads = 0;
};

struct Command {
  CLI::App* app = nullptr;
  std::function<void()> run;
};

void write_manifest(const CLI::App& app, const Common& common, const fs::path& output,
                    const std::vector<std::string>& outputs, const Clock& clock,
                    const json& extra = json::object()) {
  RunManifest m;
  m.command = app.get_name();
  m.config = resolved_options(app);
  for (auto it = extra.begin(); it != extra.end(); ++it) m.config[it.key()] = it.value();
  m.seed = common.seed;
  m.outputs = outputs;
  m.wall_clock_s = clock.seconds();
  m.save_next_to(output);
}

void add_common(CLI::App* app, Common& common, const std::string& default_out) {
  common.out = default_out;
  app->add_option("--out", common.out, "output path")->capture_default_str();
  app->add_option("--seed", common.seed, "random seed")->capture_default_str();
  app->add_flag("--strict", common.strict, "treat non-convergence as an error");
  app->add_option("--threads", common.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  return fs::path(out.string() + suffix);
}

const SpeciesParams& species(const std::string& label) {
  static const SpeciesTable table = SpeciesTable::builtin();
  return table.get(label);
}

void print_kv(const char* key, double value) {
  std::cout << key << " = " << format_double(value) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangling-gate design for microwave-dressed polar molecules"};
  app.set_version_flag("--version", POLARGATE_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file whose keys mirror the long option names");
  app.fallthrough();

  Common common;
  std::vector<Command> commands;

  // spectrum ---------------------------------------------------------------
  double v_hz = -1850.0;
  double omega_hz = 731.0;
  std::string delta_range = "-4000:4000:10";
  {
    auto* sub = app.add_subcommand("spectrum", "two-molecule energies versus detuning");
    add_common(sub, common, "spectrum.csv");
    sub->add_option("--v-hz", v_hz, "DDI energy V/h")->capture_default_str();
    sub->add_option("--omega-hz", omega_hz, "Rabi frequency Omega/2pi")->capture_default_str();
    sub->add_option("--delta-range", delta_range, "detuning grid lo:hi:step")
        ->capture_default_str();
    commands.push_back({sub, [&, sub] {
      Clock clock;
      const auto grid = parse_range(delta_range, "--delta-range").grid();
      const auto scan = spectrum_scan(grid, units::hz_to_joule(v_hz), units::hz_to_rad(omega_hz));
      const fs::path out = common.out;
      const fs::path gaps = sibling(out, ".gaps.csv");
      spectrum_csv(scan).save(out);
      gap_minima_csv(scan).save(gaps);
      std::cout << "gap minima (delta_hz, refined_hz, gap_hz):\n";
      for (const auto& m : scan.gap_minima) {
        std::cout << "  " << format_double(m.delta_hz) << ' ' << format_double(m.refined_hz)
                  << ' ' << format_double(m.gap_hz) << '\n';
      }
      write_manifest(*sub, common, out, {out.string(), gaps.string()}, clock);
      write_manifest(*sub, common, gaps, {out.string(), gaps.string()}, clock);
    }});
  }

  // gauss-scan -------------------------------------------------------------
  double g_tau_us = 500.0;
  double g_rms_us = 118.0;
  double g_omega_hz = 1200.0;
  double g_delta_hz = -1970.0;
  double g_step_us = 1.0;
  std::string g_range = "-300:300:10";
  {
    auto* sub = app.add_subcommand("gauss-scan", "Gaussian-pulse fidelity versus detuning error");
    add_common(sub, common, "gauss_scan.csv");
    sub->add_option("--v-hz", v_hz, "DDI energy V/h")->capture_default_str();
    sub->add_option("--tau-us", g_tau_us, "gate duration")->capture_default_str();
    sub->add_option("--tau-rms-us", g_rms_us, "Gaussian rms width")->capture_default_str();
    sub->add_option("--omega-hz", g_omega_hz, "peak Rabi frequency")->capture_default_str();
    sub->add_option("--delta-hz", g_delta_hz, "nominal detuning")->capture_default_str();
    sub->add_option("--step-us", g_step_us, "discretization step")->capture_default_str();
    sub->add_option("--delta-range", g_range, "error grid lo:hi:step")->capture_default_str();
    commands.push_back({sub, [&, sub] {
      Clock clock;
      GaussianPulse pulse;
      pulse.tau_gate = g_tau_us * 1e-6;
      pulse.tau_rms = g_rms_us * 1e-6;
      pulse.omega_max = units::hz_to_rad(g_omega_hz);
      pulse.delta = units::hz_to_rad(g_delta_hz);
      pulse.validate();
      const auto grid = parse_range(g_range, "--delta-range").grid();
      const auto scan = gaussian_error_scan(pulse, units::hz_to_joule(v_hz), grid,
                                            common.threads, g_step_us * 1e-6);
      const fs::path out = common.out;
      scan_csv(scan).save(out);
      const auto best = std::max_element(scan.begin(), scan.end(), [](auto& a, auto& b) {
        return a.fidelity < b.fidelity;
      });
      print_kv("peak_delta_err_hz", best->delta_err_hz);
      print_kv("peak_fidelity", best->fidelity);
      write_manifest(*sub, common, out, {out.string()}, clock);
    }});
  }

  // grape ------------------------------------------------------------------
  int steps = 100;
  double dt_us = 5.0;
  double cap_hz = 50000.0;
  std::optional<double> delta_hz;
  int max_iters = 5000;
  int restarts = 16;
  std::string grape_config;
  {
    auto* sub = app.add_subcommand("grape", "robust BFGS-GRAPE pulse optimization");
    add_common(sub, common, "pulse.json");
    sub->add_option("--v-hz", v_hz, "DDI energy V/h")->capture_default_str();
    sub->add_option("--delta-hz", delta_hz, "nominal detuning (default V/h)");
    sub->add_option("--steps", steps, "number of piecewise-constant steps")->capture_default_str();
    sub->add_option("--dt-us", dt_us, "step duration")->capture_default_str();
    sub->add_option("--cap-hz", cap_hz, "amplitude cap")->capture_default_str();
    sub->add_option("--max-iters", max_iters, "BFGS iteration budget")->capture_default_str();
    sub->add_option("--restarts", restarts, "multi-start candidates")->capture_default_str();
    sub->add_option("--grape-config", grape_config, "GrapeConfig JSON (grids, tolerances)");
    commands.push_back({sub, [&, sub] {
      Clock clock;
      GrapeConfig config;
      if (!grape_config.empty()) config = GrapeConfig::from_json(load_json(grape_config));
      config.n_steps = steps;
      config.dt = dt_us * 1e-6;
      config.omega_cap = units::hz_to_rad(cap_hz);
      config.rng_seed = common.seed;
      config.max_iters = max_iters;
      config.restarts = restarts;
      config.threads = common.threads;
      config.validate();
      const GateSystem system{units::hz_to_rad(delta_hz.value_or(v_hz)), units::hz_to_joule(v_hz)};
      auto result = grape_optimize(config, system);
      result.pulse.meta()["delta_hz"] = delta_hz.value_or(v_hz);
      result.pulse.meta()["v_hz"] = v_hz;
      const fs::path out = common.out;
      const fs::path report = sibling(out, ".report.json");
      result.pulse.save(out);
      save_json(result.report.to_json(), report);
      const json resolved = {{"grape_config", config.to_json()}};
      write_manifest(*sub, common, out, {out.string(), report.string()}, clock, resolved);
      write_manifest(*sub, common, report, {out.string(), report.string()}, clock, resolved);
      print_kv("ensemble_fidelity", result.report.final_fidelity);
      for (const auto& g : result.report.grid) {
        if (g.f_omega == 1.0 && g.delta_offset_hz == 0.0) print_kv("nominal_fidelity", g.fidelity);
      }
      std::cout << "stop_reason = " << result.report.stop_reason << '\n';
      if (common.strict && !result.report.converged) {
        throw NumericalError("grape did not converge: " + result.report.stop_reason);
      }
    }});
  }

  // scan -------------------------------------------------------------------
  std::string pulse_path;
  std::string f_range = "0.85:1.15:0.01";
  std::string scan_range = "-1500:1500:50";
  {
    auto* sub = app.add_subcommand("scan", "robustness map of a pulse in the 4x4 space");
    add_common(sub, common, "map.csv");
    sub->add_option("--pulse", pulse_path, "pulse JSON")->required();
    sub->add_option("--v-hz", v_hz, "DDI energy V/h")->capture_default_str();
    sub->add_option("--delta-hz", delta_hz, "nominal detuning (default V/h)");
    sub->add_option("--delta-range", scan_range, "detuning error grid")->capture_default_str();
    sub->add_option("--f-range", f_range, "Rabi multiplier grid")->capture_default_str();
    commands.push_back({sub, [&, sub] {
      Clock clock;
      const Pulse pulse = Pulse::load(pulse_path);
      const GateSystem system{units::hz_to_rad(delta_hz.value_or(v_hz)), units::hz_to_joule(v_hz)};
      const auto map = robustness_scan(pulse, system, parse_range(scan_range, "--delta-range").grid(),
                                       parse_range(f_range, "--f-range").grid(), common.threads);
      const fs::path out = common.out;
      map_csv(map).save(out);
      print_kv("min_fidelity", map.min());
      write_manifest(*sub, common, out, {out.string()}, clock);
    }});
  }

  // motional ---------------------------------------------------------------
  double fa_hz = 200e3;
  double fb_hz = 204e3;
  double df_hz = 500.0;
  double r_nm = 800.0;
  std::string species_label = "CaF";
  std::string elements_out;
  {
    auto* sub = app.add_subcommand("motional",
                                   "motional-robust optimization and 12x12 fidelity map");
    add_common(sub, common, "motional_map.csv");
    sub->add_option("--pulse", pulse_path, "evaluate this pulse instead of optimizing");
    sub->add_option("--species", species_label, "species label")->capture_default_str();
    sub->add_option("--f-trap-a-hz", fa_hz, "trap frequency of molecule A")->capture_default_str();
    sub->add_option("--f-trap-b-hz", fb_hz, "trap frequency of molecule B")->capture_default_str();
    sub->add_option("--delta-f-trap-hz", df_hz, "trap-frequency shift of |1>")
        ->capture_default_str();
    sub->add_option("--r-nm", r_nm, "trap separation")->capture_default_str();
    sub->add_option("--delta-hz", delta_hz, "nominal detuning (default: ground-block resonance)");
    sub->add_option("--steps", steps, "number of steps")->capture_default_str();
    sub->add_option("--dt-us", dt_us, "step duration")->capture_default_str();
    sub->add_option("--cap-hz", cap_hz, "amplitude cap")->capture_default_str();
    sub->add_option("--max-iters", max_iters, "BFGS iteration budget")->capture_default_str();
    sub->add_option("--restarts", restarts, "multi-start candidates")->capture_default_str();
    sub->add_option("--delta-range", scan_range, "detuning error grid")->capture_default_str();
    sub->add_option("--f-range", f_range, "Rabi multiplier grid")->capture_default_str();
    sub->add_option("--elements", elements_out, "also write the DDI matrix elements CSV");
    commands.push_back({sub, [&, sub] {
      Clock clock;
      const auto& sp = species(species_label);
      TrapConfig trap{fa_hz, fb_hz, df_hz, r_nm * 1e-9, sp.mass};
      trap.validate();
      const DdiTable table = DdiTable::compute(trap, sp.d10);
      const fs::path out = common.out;
      std::vector<std::string> outputs{out.string(), sibling(out, ".phases.json").string()};
      Pulse pulse(1.0, {});
      double nominal = delta_hz ? units::hz_to_rad(*delta_hz) : motional_nominal_delta(trap, table);
      if (!pulse_path.empty()) {
        pulse = Pulse::load(pulse_path);
      } else {
        GrapeConfig config;
        config.n_steps = steps;
        config.dt = dt_us * 1e-6;
        config.omega_cap = units::hz_to_rad(cap_hz);
        config.rng_seed = common.seed;
        config.max_iters = max_iters;
        config.restarts = restarts;
        config.threads = common.threads;
        auto result = grape_motional(config, trap, sp, nominal);
        pulse = result.pulse;
        const fs::path pulse_out = sibling(out, ".pulse.json");
        const fs::path report_out = sibling(out, ".report.json");
        pulse.save(pulse_out);
        save_json(result.report.to_json(), report_out);
        outputs.push_back(pulse_out.string());
        outputs.push_back(report_out.string());
        write_manifest(*sub, common, pulse_out, outputs, clock);
        write_manifest(*sub, common, report_out, outputs, clock);
        if (common.strict && !result.report.converged) {
          throw NumericalError("grape_motional did not converge: " + result.report.stop_reason);
        }
      }
      const auto map = motional_scan(pulse, nominal, trap, table,
                                     parse_range(scan_range, "--delta-range").grid(),
                                     parse_range(f_range, "--f-range").grid(), common.threads);
      map_csv(map.map).save(out);
      save_json(block_phase_sidecar(map), sibling(out, ".phases.json"));
      if (!elements_out.empty()) {
        matrix_elements_csv(trap, sp.d10).save(elements_out);
        outputs.push_back(elements_out);
        write_manifest(*sub, common, elements_out, outputs, clock);
      }
      print_kv("nominal_delta_hz", units::rad_to_hz(nominal));
      print_kv("min_fidelity", map.map.min());
      write_manifest(*sub, common, out, outputs, clock);
      write_manifest(*sub, common, sibling(out, ".phases.json"), outputs, clock);
    }});
  }

  // scale ------------------------------------------------------------------
  std::string to_label = "RbCs";
  std::string from_label = "CaF";
  double from_r_nm = 800.0;
  double tau_ms = 0.54;
  {
    auto* sub = app.add_subcommand("scale", "rescale a gate between species and separations");
    add_common(sub, common, "scaling.json");
    sub->add_option("--from", from_label, "source species")->capture_default_str();
    sub->add_option("--to", to_label, "target species")->capture_default_str();
    sub->add_option("--from-r-nm", from_r_nm, "source separation")->capture_default_str();
    sub->add_option("--r-nm", r_nm, "target separation")->capture_default_str();
    sub->add_option("--pulse", pulse_path, "pulse to rescale (writes <out>.pulse.json)");
    sub->add_option("--tau-ms", tau_ms, "gate time when no pulse is given")->capture_default_str();
    sub->add_option("--cap-hz", cap_hz, "amplitude cap when no pulse is given")
        ->capture_default_str();
    commands.push_back({sub, [&, sub] {
      Clock clock;
      const auto& from = species(from_label);
      const auto& to = species(to_label);
      const fs::path out = common.out;
      std::vector<std::string> outputs{out.string()};
      ScalingResult result;
      if (!pulse_path.empty()) {
        const auto scaled = species_scale(Pulse::load(pulse_path), from, from_r_nm * 1e-9, to,
                                          r_nm * 1e-9);
        const fs::path pulse_out = sibling(out, ".pulse.json");
        scaled.pulse.save(pulse_out);
        outputs.push_back(pulse_out.string());
        write_manifest(*sub, common, pulse_out, outputs, clock);
        result = scaled.result;
      } else {
        const double zeta = scaling_ratio(from, from_r_nm * 1e-9, to, r_nm * 1e-9);
        result = scale_parameters(zeta, tau_ms * 1e-3, units::hz_to_rad(cap_hz));
      }
      save_json(result.to_json(), out);
      print_kv("zeta", result.zeta);
      print_kv("gate_time_s", result.gate_time);
      print_kv("omega_cap_hz", units::rad_to_hz(result.omega_cap));
      write_manifest(*sub, common, out, outputs, clock);
    }});
  }

  // edm --------------------------------------------------------------------
  std::string edm_range = "-5000:5000:10";
  double edm_omega_hz = 731.0;
  {
    auto* sub = app.add_subcommand("edm", "dressed-state dipole moment versus detuning");
    add_common(sub, common, "edm.csv");
    sub->add_option("--species", species_label, "species label")->capture_default_str();
    sub->add_option("--omega-hz", edm_omega_hz, "Rabi frequency")->capture_default_str();
    sub->add_option("--delta-range", edm_range, "detuning grid")->capture_default_str();
    commands.push_back({sub, [&, sub] {
      Clock clock;
      const auto& sp = species(species_label);
      CsvTable table({"delta_hz", "edm_debye"});
      for (double d : parse_range(edm_range, "--delta-range").grid()) {
        table.add_row({d, units::cm_to_debye(dressed_edm(units::hz_to_rad(d),
                                                         units::hz_to_rad(edm_omega_hz), sp.d10))});
      }
      const fs::path out = common.out;
      table.save(out);
      write_manifest(*sub, common, out, {out.string()}, clock);
    }});
  }

  try {
    // Keys of a --config file are injected ahead of the real arguments so that
    // explicit flags win.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") {
        const json cfg = load_json(args[i + 1]);
        if (!cfg.is_object()) throw ConfigError("--config: expected a JSON object");
        std::vector<std::string> injected;
        for (auto it = cfg.begin(); it != cfg.end(); ++it) {
          const std::string flag = "--" + it.key();
          if (it.value().is_boolean()) {
            if (it.value().get<bool>()) injected.push_back(flag);
          } else {
            injected.push_back(flag);
            injected.push_back(it.value().is_string() ? it.value().get<std::string>()
                                                      : it.value().dump());
          }
        }
        // Subcommand options must follow the subcommand name.
        std::size_t pos = 0;
        while (pos < args.size() && app.get_subcommand_no_throw(args[pos]) == nullptr) ++pos;
        if (pos < args.size()) args.insert(args.begin() + static_cast<long>(pos) + 1,
                                           injected.begin(), injected.end());
        break;
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    for (const auto& c : commands) {
      if (c.app->parsed()) c.run();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
