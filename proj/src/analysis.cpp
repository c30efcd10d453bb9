#include "polargate/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "polargate/errors.hpp"
#include "polargate/hamiltonian.hpp"
#include "polargate/linalg.hpp"
#include "polargate/units.hpp"

namespace polargate {

SpectrumScan spectrum_scan(const std::vector<double>& delta_grid_hz, double v, double omega) {
  if (delta_grid_hz.empty()) throw ConfigError("spectrum_scan: delta grid is empty");
  SpectrumScan scan;
  scan.delta_hz = delta_grid_hz;
  scan.energies_hz.reserve(delta_grid_hz.size());
  std::array<std::vector<double>, 2> gaps;
  for (double d : delta_grid_hz) {
    const DriveParams drive{units::hz_to_rad(d), omega, 0.0, v};
    const RVector all = eigh(h_two(Basis::bell4, drive).matrix()).values;
    std::array<double, 4> e{};
    for (int k = 0; k < 4; ++k) e[static_cast<std::size_t>(k)] = units::joule_to_hz(all(k));
    std::sort(e.begin(), e.end());
    scan.energies_hz.push_back(e);

    // Gaps are taken in the symmetric block, where the crossings are avoided.
    const RVector sym = eigh(h_sym3(drive).matrix()).values;
    gaps[0].push_back(units::joule_to_hz(sym(1) - sym(0)));
    gaps[1].push_back(units::joule_to_hz(sym(2) - sym(1)));
  }

  const std::size_t n = delta_grid_hz.size();
  for (int level = 0; level < 2; ++level) {
    const auto& g = gaps[static_cast<std::size_t>(level)];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (!(g[i] <= g[i - 1] && g[i] < g[i + 1])) continue;
      GapMinimum m{delta_grid_hz[i], delta_grid_hz[i], g[i], level};
      const double x0 = delta_grid_hz[i - 1];
      const double x1 = delta_grid_hz[i];
      const double x2 = delta_grid_hz[i + 1];
      const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
      if (denom != 0.0) {
        const double a = (x2 * (g[i] - g[i - 1]) + x1 * (g[i - 1] - g[i + 1]) +
                          x0 * (g[i + 1] - g[i])) / denom;
        const double b = (x2 * x2 * (g[i - 1] - g[i]) + x1 * x1 * (g[i + 1] - g[i - 1]) +
                          x0 * x0 * (g[i] - g[i + 1])) / denom;
        if (a > 0.0) m.refined_hz = std::clamp(-b / (2.0 * a), x0, x2);
      }
      scan.gap_minima.push_back(m);
    }
  }
  std::sort(scan.gap_minima.begin(), scan.gap_minima.end(),
            [](const GapMinimum& a, const GapMinimum& b) { return a.delta_hz < b.delta_hz; });
  return scan;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("uniform_grid: step must be > 0");
  if (!(hi >= lo)) throw ConfigError("uniform_grid: empty range");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

double leakage_estimate(double omega_off, double delta_off) {
  if (delta_off == 0.0) throw DomainError("leakage_estimate: zero detuning");
  const double r = omega_off / delta_off;
  return r * r;
}

double bloch_siegert_shift(double omega, double omega_mw) {
  if (!(omega_mw > 0.0)) throw DomainError("bloch_siegert_shift: omega_mw must be > 0");
  return omega * omega / omega_mw / units::kTwoPi;
}

double stark_stability(double delta_alpha_over_alpha, double intensity_ripple, double u_trap) {
  if (!(u_trap >= 0.0)) throw DomainError("stark_stability: u_trap must be >= 0");
  return delta_alpha_over_alpha * intensity_ripple * u_trap / units::kPlanck;
}

nlohmann::json ScalingResult::to_json() const {
  return {{"zeta", zeta},
          {"gate_time_s", gate_time},
          {"omega_cap_hz", units::rad_to_hz(omega_cap)}};
}

double scaling_ratio(const SpeciesParams& from, double r_from, const SpeciesParams& to,
                     double r_to) {
  if (!(from.d10 > 0.0) || !(to.d10 > 0.0)) {
    throw DomainError("species_scale: dipole moments must be > 0");
  }
  if (!(r_from > 0.0) || !(r_to > 0.0)) {
    throw DomainError("species_scale: separations must be > 0");
  }
  const double d = to.d10 / from.d10;
  const double r = r_from / r_to;
  return d * d * r * r * r;
}

ScalingResult scale_parameters(double zeta, double tau_gate, double omega_cap) {
  if (!(zeta > 0.0)) throw DomainError("scale_parameters: zeta must be > 0");
  return {zeta, tau_gate / zeta, omega_cap * zeta};
}

Pulse scale_pulse(const Pulse& pulse, double zeta) {
  if (!(zeta > 0.0)) throw DomainError("scale_pulse: zeta must be > 0");
  std::vector<PulseStep> steps = pulse.steps();
  for (auto& s : steps) s.amplitude *= zeta;
  Pulse out(pulse.dt() / zeta, std::move(steps), pulse.meta());
  out.meta()["scaled_by_zeta"] = zeta;
  return out;
}

ScaledPulse species_scale(const Pulse& pulse, const SpeciesParams& from, double r_from,
                          const SpeciesParams& to, double r_to) {
  const double zeta = scaling_ratio(from, r_from, to, r_to);
  return {scale_pulse(pulse, zeta),
          scale_parameters(zeta, pulse.duration(), pulse.max_amplitude())};
}

}  // namespace polargate
