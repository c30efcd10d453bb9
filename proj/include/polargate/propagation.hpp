#pragma once

#include <vector>

#include "polargate/hamiltonian.hpp"
#include "polargate/linalg.hpp"
#include "polargate/pulse.hpp"

namespace polargate {

struct Propagator {
  CMatrix matrix;
  Basis basis = Basis::bell4;
  bool empty_pulse = false;  // set when propagated from a pulse with no steps

  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Target transformation in {|11>,|Psi+>,|00>,|Psi->}: |11> -> -|Psi+>,
/// |Psi+> -> |11>, |00> -> |00>, |Psi-> -> e^{i beta}|Psi->.
CMatrix target_gate(double beta);
/// Upper-left 3x3 block of target_gate, acting on the symmetric subspace.
const CMatrix& target_sym3();

/// How the free phase on |Psi-> is chosen when scoring.
struct BetaPolicy {
  enum class Kind { fixed, absorb };
  Kind kind = Kind::absorb;
  double beta = 0.0;

  static BetaPolicy fixed(double beta) { return {Kind::fixed, beta}; }
  /// beta chosen to maximize the fidelity.
  static BetaPolicy absorb() { return {Kind::absorb, 0.0}; }
};

struct GateScore {
  double fidelity = 0.0;  // |tr(T^dagger U)/dim|^2
  double beta = 0.0;      // phase used for |Psi->, zero for dim 3
  Complex overlap;        // tr(T^dagger U)/dim
};

/// Unitary exp(-i H dt / hbar) of one step, H in joules.
/// Throws NumericalError when H is not Hermitian to 1e-12.
Propagator expm_step(const CMatrix& h, Basis basis, double dt);

/// Time-ordered product U_N ... U_1 of the system driven by `pulse` with
/// every quadrature multiplied by `amplitude_factor`.
Propagator propagate(const Pulse& pulse, const HamiltonianSpec& system,
                     double amplitude_factor = 1.0);

/// The Gaussian is discretized on `step`-sized slices (1 us by default).
Propagator propagate(const GaussianPulse& pulse, double v, Basis basis = Basis::bell4,
                     double step = GaussianPulse::kDefaultStep);

/// Drift-only system (controls enter through the pulse) for bell4, product4
/// or sym3 at detuning `delta` (rad/s) and DDI energy `v` (J).
HamiltonianSpec two_molecule_system(Basis basis, double delta, double v);

/// Scores U against the target (T3 for dim 3, T(beta) for dim 4; product4
/// propagators are rotated to bell4 first). Throws NumericalError when U is
/// not unitary to 1e-9.
GateScore score_gate(const Propagator& u, BetaPolicy policy = BetaPolicy::absorb());
double gate_fidelity(const Propagator& u, BetaPolicy policy = BetaPolicy::absorb());

/// Shortest gate that resolves the two DDI-split transitions, 2 pi hbar / |V|.
double minimum_resolvable_gate_time(double v);
/// False (a warning condition, not an error) when tau_gate < 2 pi hbar / |V|.
bool gate_time_resolves(double tau_gate, double v);

struct ErrorScanPoint {
  double delta_err_hz = 0.0;
  double fidelity = 0.0;
};

/// F(eps) for the Gaussian gate with detuning delta + 2 pi eps.
std::vector<ErrorScanPoint> gaussian_error_scan(const GaussianPulse& base, double v,
                                                const std::vector<double>& delta_error_grid_hz,
                                                int threads = 0,
                                                double step = GaussianPulse::kDefaultStep);

}  // namespace polargate
