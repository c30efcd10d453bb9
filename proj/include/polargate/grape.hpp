#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polargate/linalg.hpp"
#include "polargate/propagation.hpp"
#include "polargate/pulse.hpp"

namespace polargate {

/// Optimization settings. dt in s, omega_cap in rad/s, offsets in Hz.
struct GrapeConfig {
  int n_steps = 100;
  double dt = 5e-6;
  double omega_cap = 0.0;
  std::vector<double> f_omega_grid{0.9, 1.0, 1.1};
  std::vector<double> delta_offset_grid_hz{-1000.0, -500.0, 0.0, 500.0, 1000.0};
  std::uint64_t rng_seed = 42;
  int max_iters = 5000;
  double grad_tol = 1e-8;
  int threads = 0;
  // Multi-start: `restarts` seeded candidates are run for `screen_iters`
  // iterations each, and the best one continues for max_iters.
  int restarts = 16;
  int screen_iters = 250;

  double tau_gate() const { return n_steps * dt; }
  void validate() const;

  /// JSON keys: n_steps, dt_s, omega_cap_hz, f_omega_grid,
  /// delta_offset_grid_hz, rng_seed, max_iters, grad_tol, threads,
  /// restarts, screen_iters.
  nlohmann::json to_json() const;
  static GrapeConfig from_json(const nlohmann::json& j);
};

/// Nominal two-molecule operating point: detuning (rad/s) and DDI energy (J).
struct GateSystem {
  double delta = 0.0;
  double v = 0.0;
};

/// One member of a robustness ensemble, angular-frequency units:
/// H = drift + f (Omega_x control_x + Omega_y control_y).
struct EnsembleMember {
  CMatrix drift;
  CMatrix control_x;
  CMatrix control_y;
  CMatrix target;
  double amplitude_factor = 1.0;
  double weight = 1.0;
};

/// Objective maximized by optimize_ensemble. Controls are the interleaved
/// quadratures [Ox_0, Oy_0, Ox_1, Oy_1, ...] in rad/s.
class FidelityObjective {
 public:
  virtual ~FidelityObjective() = default;
  virtual double fidelity_and_gradient(const std::vector<double>& quadratures,
                                       std::vector<double>& gradient, int threads = 1) const = 0;
};

/// tr(probe_k^dagger U) for every probe and its gradient with respect to the
/// quadratures, from one forward and one backward sweep.
struct OverlapEvaluation {
  std::vector<Complex> values;
  std::vector<std::vector<Complex>> gradients;
};
OverlapEvaluation overlap_gradients(const EnsembleMember& member, double dt,
                                    const std::vector<double>& quadratures,
                                    const std::vector<CMatrix>& probes);

/// Weighted mean of |tr(target^dagger U)/d|^2 over the members, with an
/// exact gradient.
class ControlEnsemble : public FidelityObjective {
 public:
  ControlEnsemble(double dt, std::vector<EnsembleMember> members);

  double dt() const { return dt_; }
  const std::vector<EnsembleMember>& members() const { return members_; }

  double fidelity(const std::vector<double>& quadratures, int threads = 1) const;
  std::vector<double> member_fidelities(const std::vector<double>& quadratures,
                                        int threads = 1) const;
  /// Returns the fidelity and fills `gradient` (same layout as the controls).
  double fidelity_and_gradient(const std::vector<double>& quadratures,
                               std::vector<double>& gradient, int threads = 1) const override;

 private:
  double dt_;
  std::vector<EnsembleMember> members_;
  double total_weight_;
};

/// The {f_Omega} x {delta + 2 pi offset} ensemble on the 3x3 symmetric system.
ControlEnsemble make_sym3_ensemble(const GrapeConfig& config, const GateSystem& system);

double ensemble_fidelity(const Pulse& controls, const GrapeConfig& config,
                         const GateSystem& system);
/// Interleaved dF/dOmega_x(j), dF/dOmega_y(j) in 1/(rad/s).
std::vector<double> fidelity_gradient(const Pulse& controls, const GrapeConfig& config,
                                      const GateSystem& system);

struct GridPointFidelity {
  double f_omega = 1.0;
  double delta_offset_hz = 0.0;
  double fidelity = 0.0;
};

struct OptimizationReport {
  double final_fidelity = 0.0;  // ensemble mean in the optimization space
  std::vector<GridPointFidelity> grid;  // evaluation-space fidelity per grid point
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string stop_reason;
  std::uint64_t initial_seed = 0;  // seed of the candidate that was continued
  std::vector<double> screen_fidelities;  // one per multi-start candidate
  std::vector<double> fidelity_history;
  std::vector<double> grad_norm_history;

  nlohmann::json to_json() const;
};

struct GrapeResult {
  Pulse pulse;
  OptimizationReport report;
};

/// Uniform amplitudes in [0, 0.1 omega_cap] and phases in [0, 2 pi) from a
/// 64-bit Mersenne twister seeded with `seed`.
Pulse random_initial_pulse(const GrapeConfig& config, std::uint64_t seed);

/// Seeds of the multi-start candidates; the first is config.rng_seed.
std::vector<std::uint64_t> candidate_seeds(const GrapeConfig& config);

/// Bound-constrained BFGS-GRAPE over an arbitrary ensemble; amplitudes never
/// exceed config.omega_cap. Without an initial pulse the multi-start
/// candidates from candidate_seeds are screened first.
GrapeResult optimize_ensemble(const FidelityObjective& ensemble, const GrapeConfig& config,
                              const std::optional<Pulse>& initial);

/// Optimizes on the 3x3 ensemble; the report's grid holds bell4 fidelities.
GrapeResult grape_optimize(const GrapeConfig& config, const GateSystem& system,
                           const std::optional<Pulse>& initial = std::nullopt);

/// Evaluation-space (bell4, beta absorbed) fidelity for one grid point.
double bell4_fidelity(const Pulse& pulse, const GateSystem& system, double f_omega,
                      double delta_offset_hz);

struct FidelityMap {
  std::vector<double> delta_err_hz;
  std::vector<double> f_omega;
  std::vector<double> values;  // row-major: values[i_f * delta_err_hz.size() + i_delta]

  double at(std::size_t i_f, std::size_t i_delta) const {
    return values[i_f * delta_err_hz.size() + i_delta];
  }
  double min() const;
};

FidelityMap robustness_scan(const Pulse& pulse, const GateSystem& system,
                            const std::vector<double>& delta_err_grid_hz,
                            const std::vector<double>& f_omega_grid, int threads = 0);

}  // namespace polargate
