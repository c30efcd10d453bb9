// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance               run all criteria
//   acceptance --criterion 4 run one
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "polargate/analysis.hpp"
#include "polargate/grape.hpp"
#include "polargate/hamiltonian.hpp"
#include "polargate/motional.hpp"
#include "polargate/propagation.hpp"
#include "polargate/units.hpp"

using namespace polargate;
using namespace polargate::units;

namespace {

// Tolerances and budgets.
constexpr double kC1Target = -1847.0, kC1Tol = 1.0, kC1Budget = 1e-3;
constexpr double kC2Resolution = 10.0, kC2Budget = 5.0;
constexpr double kC3Target = 0.95, kC3Tol = 0.02, kC3Budget = 30.0;
constexpr double kC4Nominal = 0.9999, kC4Rect = 0.999, kC4Budget = 1800.0;
constexpr double kC5RoundedTol = 2.0, kC5OracleTol = 1.0, kC5Budget = 10.0;
constexpr double kC6Threshold = 0.999, kC6Budget = 7200.0;
constexpr double kC7Zeta1 = 0.0741, kC7Zeta1Tol = 0.0005;
constexpr double kC7Zeta2 = 0.25, kC7Zeta2Tol = 0.01;
constexpr double kC7Time1 = 7.3e-3, kC7Time2 = 2.2e-3, kC7TimeRel = 0.02, kC7Budget = 1e-3;
constexpr double kC8Leak = 4e-5, kC8Bs = 1.0, kC8Stark = 100.0, kC8StarkTol = 0.1,
                 kC8Budget = 1e-3;
constexpr double kC9Unitary = 1e-10, kC9Gradient = 1e-6, kC9Basis = 1e-10, kC9Scaling = 1e-9,
                 kC9Phase = 1e-9;

constexpr double kV = -1850.0;  // Hz

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const SpeciesParams& species(const char* label) { return SpeciesTable::builtin().get(label); }

GrapeConfig robust_gate_config() {
  GrapeConfig c;
  c.n_steps = 100;
  c.dt = 5e-6;
  c.omega_cap = hz_to_rad(50e3);
  return c;
}

Outcome c1() {
  Timer t;
  const double v = geometry_factor(0.0) * vddi_point(species("CaF").d10, 0.8e-6);
  const double s = t.seconds();
  const double hz = joule_to_hz(v);
  return {std::abs(hz - kC1Target) <= kC1Tol && s < kC1Budget,
          fmt("V/h = %.3f Hz (target %.0f +- %.0f), %.2e s", hz, kC1Target, kC1Tol, s)};
}

Outcome c2() {
  Timer t;
  const auto scan =
      spectrum_scan(uniform_grid(-4000.0, 4000.0, 10.0), hz_to_joule(kV), hz_to_rad(731.0));
  const double s = t.seconds();
  bool ok = s < kC2Budget;
  std::string where;
  for (double expect : {kV, 0.0, -kV}) {
    double nearest = 1e300;
    for (const auto& m : scan.gap_minima) {
      if (std::abs(m.delta_hz - expect) < std::abs(nearest - expect)) nearest = m.delta_hz;
    }
    ok = ok && std::abs(nearest - expect) <= kC2Resolution;
    where += fmt(" %+.0f->%+.0f", expect, nearest);
  }
  return {ok, fmt("minima expected->found (Hz):%s, %.3f s", where.c_str(), s)};
}

Outcome c3() {
  Timer t;
  GaussianPulse g;
  g.tau_gate = 0.5e-3;
  g.tau_rms = 0.118e-3;
  g.omega_max = hz_to_rad(1200.0);
  g.delta = hz_to_rad(-1970.0);
  std::vector<double> grid;
  for (int k = -30; k <= 30; ++k) grid.push_back(10.0 * k);
  const auto scan = gaussian_error_scan(g, hz_to_joule(kV), grid, 0);
  const double s = t.seconds();
  double fm = 0.0, fp = 0.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (scan[i].delta_err_hz == -100.0) fm = scan[i].fidelity;
    if (scan[i].delta_err_hz == 100.0) fp = scan[i].fidelity;
    if (scan[i].fidelity > scan[best].fidelity) best = i;
  }
  const bool ok = std::abs(fm - kC3Target) <= kC3Tol && std::abs(fp - kC3Target) <= kC3Tol &&
                  std::abs(scan[best].delta_err_hz) <= 10.0 && s < kC3Budget;
  return {ok, fmt("F(-100) = %.5f, F(+100) = %.5f, peak %.5f at %+.0f Hz, %.2f s", fm, fp,
                  scan[best].fidelity, scan[best].delta_err_hz, s)};
}

Outcome c4() {
  Timer t;
  const auto config = robust_gate_config();
  const GateSystem sys{hz_to_rad(kV), hz_to_joule(kV)};
  const auto result = grape_optimize(config, sys);
  const double nominal = bell4_fidelity(result.pulse, sys, 1.0, 0.0);
  const auto rect = robustness_scan(result.pulse, sys, uniform_grid(-1000.0, 1000.0, 50.0),
                                    uniform_grid(0.9, 1.1, 0.025), 0);
  const double s = t.seconds();
  const bool ok = nominal >= kC4Nominal && rect.min() >= kC4Rect && s < kC4Budget;
  return {ok, fmt("nominal F = %.7f, min over rectangle = %.6f, ensemble F = %.7f, %.1f s",
                  nominal, rect.min(), result.report.final_fidelity, s)};
}

Outcome c5() {
  Timer t;
  TrapConfig trap;
  trap.mass = species("CaF").mass;
  const double d10 = species("CaF").d10;
  const auto table = DdiTable::compute(trap, d10);
  const double s = t.seconds();

  auto oracle_hz = [&](int m, int mp) {
    const auto& nb = kMotionalBasis[static_cast<std::size_t>(m)];
    const auto& nk = kMotionalBasis[static_cast<std::size_t>(mp)];
    const oracle::AxisStates a{nb.n_a, trap.oscillator_length(0, 1), nk.n_a,
                               trap.oscillator_length(0, 0)};
    const oracle::AxisStates b{nb.n_b, trap.oscillator_length(1, 0), nk.n_b,
                               trap.oscillator_length(1, 1)};
    return joule_to_hz(-2.0 * vddi_point(d10, trap.r_e) *
                       oracle::inverse_cube_series(a, b, trap.r_e));
  };
  struct Entry {
    int m, mp;
    double rounded;
  };
  const Entry entries[] = {{0, 0, -1862.0}, {1, 1, -1877.0}, {2, 2, -1877.0},
                           {0, 1, 145.0},   {0, 2, 145.0},   {1, 2, 15.0}};
  bool ok = s < kC5Budget;
  std::string detail;
  for (const auto& e : entries) {
    const double got = joule_to_hz(table.values(e.m, e.mp));
    // Off-diagonal signs depend on the phase convention of the oscillator states.
    const double compare = e.m == e.mp ? got : std::abs(got);
    const double oracle = e.m == e.mp ? oracle_hz(e.m, e.mp) : std::abs(oracle_hz(e.m, e.mp));
    ok = ok && std::abs(compare - e.rounded) <= kC5RoundedTol &&
         std::abs(got - oracle_hz(e.m, e.mp)) <= kC5OracleTol;
    detail += fmt(" (%s,%s) %.2f [oracle %.2f]", std::string(motional_label(e.m)).c_str(),
                  std::string(motional_label(e.mp)).c_str(), compare, oracle);
  }
  return {ok, fmt("Hz:%s, %.3f s", detail.c_str(), s)};
}

Outcome c6() {
  Timer t;
  TrapConfig trap;
  trap.mass = species("CaF").mass;
  const auto config = robust_gate_config();
  const auto result = grape_motional(config, trap, species("CaF"));
  const auto table = DdiTable::compute(trap, species("CaF").d10);
  const auto local = motional_scan(result.pulse, result.delta, trap, table, {-100.0, 0.0, 100.0},
                                   {0.95, 1.0, 1.05}, 0);
  const double s = t.seconds();
  const double nominal = local.map.at(1, 1);
  const bool ok = nominal >= kC6Threshold && local.map.min() >= kC6Threshold && s < kC6Budget;
  double grid_min = 1.0;
  for (const auto& r : result.grid) grid_min = std::min(grid_min, r.fidelity);
  return {ok, fmt("12x12 nominal F = %.6f, min over +-100 Hz x +-0.05 = %.6f, min over "
                  "optimization grid = %.6f, %.1f s",
                  nominal, local.map.min(), grid_min, s)};
}

Outcome c7() {
  Timer t;
  const double z1 = scaling_ratio(species("CaF"), 0.8e-6, species("RbCs"), 0.8e-6);
  const double z2 = scaling_ratio(species("CaF"), 0.8e-6, species("RbCs"), 0.532e-6);
  const auto r1 = scale_parameters(z1, 0.54e-3, hz_to_rad(50e3));
  const auto r2 = scale_parameters(z2, 0.54e-3, hz_to_rad(50e3));
  const double s = t.seconds();
  const bool ok = std::abs(z1 - kC7Zeta1) <= kC7Zeta1Tol && std::abs(z2 - kC7Zeta2) <= kC7Zeta2Tol &&
                  std::abs(r1.gate_time / kC7Time1 - 1.0) <= kC7TimeRel &&
                  std::abs(r2.gate_time / kC7Time2 - 1.0) <= kC7TimeRel && s < kC7Budget;
  return {ok, fmt("zeta = %.5f, %.5f; gate times %.3f ms (%+.2f%%), %.3f ms (%+.2f%%), %.2e s",
                  z1, z2, r1.gate_time * 1e3, 100.0 * (r1.gate_time / kC7Time1 - 1.0),
                  r2.gate_time * 1e3, 100.0 * (r2.gate_time / kC7Time2 - 1.0), s)};
}

Outcome c8() {
  Timer t;
  const double leak = leakage_estimate(hz_to_rad(55e3), hz_to_rad(10e6));
  const double bs = bloch_siegert_shift(hz_to_rad(50e3), hz_to_rad(20.778e9));
  const double stark = stark_stability(0.1, 1e-3, hz_to_joule(1e6));
  const double s = t.seconds();
  const bool ok = leak < kC8Leak && bs < kC8Bs && std::abs(stark - kC8Stark) <= kC8StarkTol &&
                  s < kC8Budget;
  return {ok, fmt("leakage %.3e, Bloch-Siegert %.4f Hz, Stark %.4f Hz, %.2e s", leak, bs, stark,
                  s)};
}

Outcome c9() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double cap = hz_to_rad(50e3);
  const GateSystem sys{hz_to_rad(kV), hz_to_joule(kV)};

  // Unitarity after 10^4 steps.
  std::vector<PulseStep> steps(10000);
  for (auto& st : steps) st = {cap * u(rng), kTwoPi * u(rng)};
  const Pulse long_pulse(5e-6, steps);
  const double unit = unitarity_defect(
      propagate(long_pulse, two_molecule_system(Basis::bell4, sys.delta, sys.v)).matrix);

  // Analytic gradient versus central differences.
  auto config = robust_gate_config();
  config.n_steps = 20;
  config.threads = 1;
  const auto ensemble = make_sym3_ensemble(config, sys);
  double grad = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q(40);
    for (auto& x : q) x = cap * (2.0 * u(rng) - 1.0) / std::sqrt(2.0);
    std::vector<double> g;
    ensemble.fidelity_and_gradient(q, g);
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double h = 1e-6 * cap;
      auto qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      const double fd = (ensemble.fidelity(qp) - ensemble.fidelity(qm)) / (2.0 * h);
      scale = std::max(scale, std::abs(fd));
      worst = std::max(worst, std::abs(fd - g[k]));
    }
    grad = std::max(grad, worst / scale);
  }

  // bell4 and product4 describe the same evolution.
  std::vector<PulseStep> short_steps(100);
  for (auto& st : short_steps) st = {cap * u(rng), kTwoPi * u(rng)};
  const Pulse pulse(5e-6, short_steps);
  const CMatrix& w = product_to_bell();
  const auto ub = propagate(pulse, two_molecule_system(Basis::bell4, sys.delta, sys.v)).matrix;
  const auto up = propagate(pulse, two_molecule_system(Basis::product4, sys.delta, sys.v)).matrix;
  const double basis = (w.adjoint() * up * w - ub).cwiseAbs().maxCoeff();

  // Rescaled pulse on the rescaled system.
  double scaling = 0.0;
  for (double zeta : {0.074156, 0.25216}) {
    const auto us = propagate(scale_pulse(pulse, zeta),
                              two_molecule_system(Basis::bell4, zeta * sys.delta, zeta * sys.v))
                        .matrix;
    scaling = std::max(scaling, (us - ub).cwiseAbs().maxCoeff());
  }

  // Block phases of synthetic block-diagonal unitaries.
  double phase = 0.0;
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double beta = ang(rng);
    const std::array<double, 3> phi{ang(rng), ang(rng), ang(rng)};
    CMatrix u12 = CMatrix::Zero(12, 12);
    for (int b = 0; b < 3; ++b) {
      const CMatrix blk = std::exp(Complex(0.0, phi[static_cast<std::size_t>(b)])) *
                          target_gate(beta);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) u12(3 * i + b, 3 * j + b) = blk(i, j);
      }
    }
    const auto r = motional_fidelity({u12, Basis::motional12, false});
    phase = std::max(phase, std::abs(1.0 - r.fidelity));
    for (std::size_t b = 0; b < 3; ++b) {
      phase = std::max(phase, std::abs(std::remainder(r.block_phases[b] - phi[b], kTwoPi)));
    }
  }

  const bool ok = unit < kC9Unitary && grad < kC9Gradient && basis < kC9Basis &&
                  scaling < kC9Scaling && phase < kC9Phase;
  return {ok, fmt("unitarity %.1e, gradient %.1e, basis %.1e, scaling %.1e, phase %.1e", unit,
                  grad, basis, scaling, phase)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance criteria");
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable)")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9};
  bool all = true;
  for (int n : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
