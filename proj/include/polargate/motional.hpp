#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polargate/grape.hpp"
#include "polargate/hamiltonian.hpp"
#include "polargate/linalg.hpp"
#include "polargate/propagation.hpp"
#include "polargate/species.hpp"

namespace polargate {

/// Harmonic traps along the separation axis. Frequencies in Hz, r_e in m,
/// mass in kg. f_trap_* refer to internal state |0>; |1> sees f + delta_f_trap.
struct TrapConfig {
  double f_trap_a = 200e3;
  double f_trap_b = 204e3;
  double delta_f_trap = 500.0;
  double r_e = 0.8e-6;
  double mass = 0.0;

  void validate() const;
  /// Trap frequency (Hz) of molecule 0 (A) or 1 (B) in internal state s.
  double frequency(int molecule, int internal_state) const;
  /// sqrt(hbar / (m 2 pi f)) in m.
  double oscillator_length(int molecule, int internal_state) const;
  /// True when every oscillator length is below `ratio` * r_e.
  bool well_separated(double ratio = 0.1) const;
  nlohmann::json to_json() const;
};

/// Motional states (n_A, n_B) in the fixed order {(0,0), (0,1), (1,0)}.
struct MotionalState {
  int n_a = 0;
  int n_b = 0;
};
inline constexpr std::array<MotionalState, 3> kMotionalBasis{{{0, 0}, {0, 1}, {1, 0}}};
std::string_view motional_label(int index);  // "00", "01", "10"

/// Product internal state (s_A, s_B), each 0 or 1.
struct InternalPair {
  int s_a = 0;
  int s_b = 0;
};
std::string_view internal_label(const InternalPair& pair);

struct MotionalKet {
  InternalPair internal;
  int motion = 0;  // index into kMotionalBasis
};

/// Quadrature settings for the DDI integrals. Results are checked against a
/// rule of twice the order and must agree to `tolerance_hz`.
struct QuadratureOptions {
  int order = 60;
  double tolerance_hz = 0.1;
  double eta = -2.0;  // head-to-tail geometry factor
};

/// <bra| eta d10^2 / (4 pi eps0 (R_e + x_B - x_A)^3) |ket> in J, restricted to the
/// exchange term |10><01| + h.c.; zero for every other pair of internal states.
/// Throws NumericalError when the quadrature has not converged.
double ddi_matrix_element(const MotionalKet& bra, const MotionalKet& ket, const TrapConfig& trap,
                          double d10, const QuadratureOptions& options = {});

/// table(m, m') = <10, m| V |01, m'> in J.
struct DdiTable {
  RMatrix values;
  static DdiTable compute(const TrapConfig& trap, double d10, const QuadratureOptions& options = {});
  double diagonal(int m) const { return values(m, m); }
};

struct MotionalOptions {
  bool include_couplings = true;  // off-diagonal DDI between motional states
};

/// 12x12 Hamiltonian, index 3 * internal + motion with the internal state in
/// bell4 order. Controls act on the internal space only.
HamiltonianSpec h_motional12(const DriveParams& drive, const TrapConfig& trap,
                             const DdiTable& table, const MotionalOptions& options = {});
HamiltonianSpec h_motional12(const DriveParams& drive, const TrapConfig& trap,
                             const SpeciesParams& species, const MotionalOptions& options = {});

/// 4x4 internal block of U12 for motional state `motion`.
CMatrix motional_block(const CMatrix& u12, int motion);

struct MotionalFidelityResult {
  double fidelity = 0.0;
  std::array<double, 3> block_fidelities{};
  std::array<double, 3> block_phases{};  // arg tr(T^dagger U_b), rad
  double beta = 0.0;
  nlohmann::json to_json() const;
};

/// Weighted |sum_b w_b e^{-i phi_b} tr(T^dagger U_b) / 4|^2 with weights summing
/// to one; uniform weights give |tr[(T (x) U_motion)^dagger U12] / 12|^2.
MotionalFidelityResult motional_fidelity(const Propagator& u12,
                                         const std::optional<std::array<double, 3>>& weights =
                                             std::nullopt,
                                         BetaPolicy policy = BetaPolicy::absorb());

/// Boltzmann populations of the truncated basis at temperature T (K).
std::array<double, 3> thermal_weights(double temperature, const TrapConfig& trap);

/// (coupling / gap)^2. Throws DomainError for a zero gap.
double population_transfer_estimate(double coupling, double gap);

/// Per-block 3x3 parameters: detuning shifted by the block's trap-energy
/// splitting between |11> and |00>, and the block's diagonal DDI.
struct BlockSystem {
  double delta = 0.0;  // rad/s
  double v = 0.0;      // J
};
std::array<BlockSystem, 3> motional_block_systems(double delta, const TrapConfig& trap,
                                                  const DdiTable& table);

/// Nominal detuning that puts the ground block's |11> on resonance with its Psi+.
double motional_nominal_delta(const TrapConfig& trap, const DdiTable& table);

/// Optimization objective on the decoupled blocks: each motional state's 4x4
/// internal block, inter-block DDI couplings dropped, scored with the
/// motional fidelity and averaged uniformly over the config grids.
class MotionalEnsemble : public FidelityObjective {
 public:
  MotionalEnsemble(const GrapeConfig& config, double delta, const TrapConfig& trap,
                   const DdiTable& table,
                   const std::optional<std::array<double, 3>>& weights = std::nullopt);

  std::size_t points() const { return points_.size(); }
  double fidelity(const std::vector<double>& quadratures, int threads = 1) const;
  double fidelity_and_gradient(const std::vector<double>& quadratures,
                               std::vector<double>& gradient, int threads = 1) const override;

 private:
  double dt_;
  std::array<double, 3> weights_;
  std::vector<std::array<EnsembleMember, 3>> points_;
};

struct MotionalGrapeResult {
  Pulse pulse;
  OptimizationReport report;
  double delta = 0.0;  // nominal detuning used (rad/s)
  std::vector<MotionalFidelityResult> grid;  // full 12x12 evaluation per grid point
};

/// Optimizes the MotionalEnsemble; each grid point is then evaluated with
/// the full 12x12 Hamiltonian.
MotionalGrapeResult grape_motional(const GrapeConfig& config, const TrapConfig& trap,
                                   const SpeciesParams& species,
                                   std::optional<double> delta = std::nullopt,
                                   const std::optional<Pulse>& initial = std::nullopt);

/// Full-space fidelity of `pulse` with detuning delta + 2 pi offset and
/// amplitudes scaled by f_omega.
MotionalFidelityResult motional_pulse_fidelity(const Pulse& pulse, double delta,
                                               const TrapConfig& trap, const DdiTable& table,
                                               double f_omega, double delta_offset_hz,
                                               const MotionalOptions& options = {});

struct MotionalMap {
  FidelityMap map;
  std::vector<std::array<double, 3>> block_phases;  // same layout as map.values
};
MotionalMap motional_scan(const Pulse& pulse, double delta, const TrapConfig& trap,
                          const DdiTable& table, const std::vector<double>& delta_err_grid_hz,
                          const std::vector<double>& f_omega_grid, int threads = 0);

}  // namespace polargate
