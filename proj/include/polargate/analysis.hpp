#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "polargate/pulse.hpp"
#include "polargate/species.hpp"

namespace polargate {

/// Local minimum of the gap between adjacent symmetric-subspace levels.
struct GapMinimum {
  double delta_hz = 0.0;    // grid point of the minimum
  double refined_hz = 0.0;  // parabolic refinement through the neighbouring points
  double gap_hz = 0.0;
  int lower_level = 0;      // 0: lowest/middle pair, 1: middle/upper pair
};

struct SpectrumScan {
  std::vector<double> delta_hz;
  std::vector<std::array<double, 4>> energies_hz;  // ascending, bell4 levels
  std::vector<GapMinimum> gap_minima;
};

/// Eigenvalues of the bell4 Hamiltonian for each detuning (Hz) at DDI
/// energy v (J) and Rabi frequency omega (rad/s, x quadrature).
SpectrumScan spectrum_scan(const std::vector<double>& delta_grid_hz, double v, double omega);

/// Uniform grid from lo to hi (inclusive) with the given step, all in Hz.
std::vector<double> uniform_grid(double lo, double hi, double step);

/// (omega_off / delta_off)^2. Throws DomainError for a zero detuning.
double leakage_estimate(double omega_off, double delta_off);

/// omega^2 / omega_mw expressed in Hz. Throws DomainError unless omega_mw > 0.
double bloch_siegert_shift(double omega, double omega_mw);

/// (delta_alpha / alpha) (dI / I) U_trap / h in Hz. Throws DomainError for u_trap < 0.
double stark_stability(double delta_alpha_over_alpha, double intensity_ripple, double u_trap);

struct ScalingResult {
  double zeta = 1.0;
  double gate_time = 0.0;       // scaled, s
  double omega_cap = 0.0;       // scaled, rad/s
  nlohmann::json to_json() const;
};

/// (d_to / d_from)^2 (r_from / r_to)^3. Throws DomainError for zero dipoles or
/// separations.
double scaling_ratio(const SpeciesParams& from, double r_from, const SpeciesParams& to,
                     double r_to);

/// Scaled gate time and cap for a gate of duration tau_gate and cap omega_cap.
ScalingResult scale_parameters(double zeta, double tau_gate, double omega_cap);

struct ScaledPulse {
  Pulse pulse;
  ScalingResult result;
};

/// dt -> dt / zeta, amplitudes -> amplitudes * zeta, phases unchanged.
Pulse scale_pulse(const Pulse& pulse, double zeta);
ScaledPulse species_scale(const Pulse& pulse, const SpeciesParams& from, double r_from,
                          const SpeciesParams& to, double r_to);

}  // namespace polargate
