#include "polargate/grape.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polargate/errors.hpp"
#include "polargate/hamiltonian.hpp"
#include "polargate/optimizer.hpp"
#include "polargate/parallel.hpp"
#include "polargate/units.hpp"

namespace polargate {

namespace {

struct MemberEvaluation {
  double fidelity = 0.0;
  std::vector<double> gradient;
};

CMatrix step_hamiltonian(const EnsembleMember& m, double ox, double oy) {
  const double f = m.amplitude_factor;
  return m.drift + (f * ox) * m.control_x + (f * oy) * m.control_y;
}

double member_fidelity(const EnsembleMember& m, double dt, const std::vector<double>& q) {
  const auto d = m.drift.rows();
  CMatrix u = CMatrix::Identity(d, d);
  for (std::size_t j = 0; 2 * j + 1 < q.size(); ++j) {
    u = expm_hermitian(step_hamiltonian(m, q[2 * j], q[2 * j + 1]), dt) * u;
  }
  const Complex z = (m.target.adjoint() * u).trace() / static_cast<double>(d);
  return std::norm(z);
}

MemberEvaluation member_gradient(const EnsembleMember& m, double dt, const std::vector<double>& q) {
  const auto d = m.drift.rows();
  const std::size_t n = q.size() / 2;
  std::vector<StepExponential> steps;
  steps.reserve(n);
  std::vector<CMatrix> forward;  // forward[j] = U_j ... U_1, forward[0] = I
  forward.reserve(n + 1);
  forward.push_back(CMatrix::Identity(d, d));
  for (std::size_t j = 0; j < n; ++j) {
    steps.push_back(StepExponential::compute(step_hamiltonian(m, q[2 * j], q[2 * j + 1]), dt));
    forward.push_back(steps.back().u * forward.back());
  }
  const double norm = 1.0 / static_cast<double>(d);
  const Complex z = (m.target.adjoint() * forward.back()).trace() * norm;

  MemberEvaluation out;
  out.fidelity = std::norm(z);
  out.gradient.assign(q.size(), 0.0);
  const CMatrix gx = m.amplitude_factor * m.control_x;
  const CMatrix gy = m.amplitude_factor * m.control_y;
  CMatrix backward = m.target.adjoint();  // T^dagger U_N ... U_{j+1}
  for (std::size_t jj = n; jj-- > 0;) {
    const auto& s = steps[jj];
    const CMatrix mk = s.vectors.adjoint() * (forward[jj] * backward) * s.vectors;
    const Complex dzx = s.trace_derivative(mk, gx, dt) * norm;
    const Complex dzy = s.trace_derivative(mk, gy, dt) * norm;
    // d|z|^2 = 2 Re(conj(z) dz)
    out.gradient[2 * jj] = 2.0 * std::real(std::conj(z) * dzx);
    out.gradient[2 * jj + 1] = 2.0 * std::real(std::conj(z) * dzy);
    backward = backward * s.u;
  }
  return out;
}

std::vector<double> grid_or_default(const nlohmann::json& j, const char* key,
                                    const std::vector<double>& fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

OverlapEvaluation overlap_gradients(const EnsembleMember& m, double dt,
                                    const std::vector<double>& q,
                                    const std::vector<CMatrix>& probes) {
  const auto d = m.drift.rows();
  const std::size_t n = q.size() / 2;
  std::vector<StepExponential> steps;
  steps.reserve(n);
  std::vector<CMatrix> forward;
  forward.reserve(n + 1);
  forward.push_back(CMatrix::Identity(d, d));
  for (std::size_t j = 0; j < n; ++j) {
    steps.push_back(StepExponential::compute(step_hamiltonian(m, q[2 * j], q[2 * j + 1]), dt));
    forward.push_back(steps.back().u * forward.back());
  }
  OverlapEvaluation out;
  out.values.reserve(probes.size());
  out.gradients.assign(probes.size(), std::vector<Complex>(q.size()));
  for (const auto& p : probes) out.values.push_back((p.adjoint() * forward.back()).trace());
  const CMatrix gx = m.amplitude_factor * m.control_x;
  const CMatrix gy = m.amplitude_factor * m.control_y;
  CMatrix backward = CMatrix::Identity(d, d);  // U_N ... U_{j+1}
  for (std::size_t jj = n; jj-- > 0;) {
    const auto& s = steps[jj];
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const CMatrix mk = s.vectors.adjoint() * (forward[jj] * probes[k].adjoint() * backward) *
                         s.vectors;
      out.gradients[k][2 * jj] = s.trace_derivative(mk, gx, dt);
      out.gradients[k][2 * jj + 1] = s.trace_derivative(mk, gy, dt);
    }
    backward = backward * s.u;
  }
  return out;
}

void GrapeConfig::validate() const {
  if (n_steps <= 0) throw ConfigError("GrapeConfig: n_steps must be > 0");
  if (!(dt > 0.0)) throw ConfigError("GrapeConfig: dt must be > 0");
  if (!(omega_cap > 0.0)) throw ConfigError("GrapeConfig: omega_cap must be > 0");
  if (f_omega_grid.empty()) throw ConfigError("GrapeConfig: f_omega_grid is empty");
  if (delta_offset_grid_hz.empty()) {
    throw ConfigError("GrapeConfig: delta_offset_grid_hz is empty");
  }
  if (std::find(f_omega_grid.begin(), f_omega_grid.end(), 1.0) == f_omega_grid.end()) {
    throw ConfigError("GrapeConfig: f_omega_grid must contain 1.0");
  }
  for (double f : f_omega_grid) {
    if (!(f > 0.0)) throw ConfigError("GrapeConfig: f_omega values must be > 0");
  }
  if (max_iters < 0) throw ConfigError("GrapeConfig: max_iters must be >= 0");
  if (!(grad_tol >= 0.0)) throw ConfigError("GrapeConfig: grad_tol must be >= 0");
  if (restarts < 1) throw ConfigError("GrapeConfig: restarts must be >= 1");
  if (screen_iters < 0) throw ConfigError("GrapeConfig: screen_iters must be >= 0");
}

nlohmann::json GrapeConfig::to_json() const {
  return {{"n_steps", n_steps},
          {"dt_s", dt},
          {"omega_cap_hz", units::rad_to_hz(omega_cap)},
          {"f_omega_grid", f_omega_grid},
          {"delta_offset_grid_hz", delta_offset_grid_hz},
          {"rng_seed", rng_seed},
          {"max_iters", max_iters},
          {"grad_tol", grad_tol},
          {"threads", threads},
          {"restarts", restarts},
          {"screen_iters", screen_iters}};
}

GrapeConfig GrapeConfig::from_json(const nlohmann::json& j) {
  GrapeConfig c;
  try {
    c.n_steps = j.value("n_steps", c.n_steps);
    c.dt = j.value("dt_s", c.dt);
    if (j.contains("omega_cap_hz")) c.omega_cap = units::hz_to_rad(j.at("omega_cap_hz").get<double>());
    c.f_omega_grid = grid_or_default(j, "f_omega_grid", c.f_omega_grid);
    c.delta_offset_grid_hz = grid_or_default(j, "delta_offset_grid_hz", c.delta_offset_grid_hz);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.grad_tol = j.value("grad_tol", c.grad_tol);
    c.threads = j.value("threads", c.threads);
    c.restarts = j.value("restarts", c.restarts);
    c.screen_iters = j.value("screen_iters", c.screen_iters);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("GrapeConfig JSON: ") + e.what());
  }
  c.validate();
  return c;
}

ControlEnsemble::ControlEnsemble(double dt, std::vector<EnsembleMember> members)
    : dt_(dt), members_(std::move(members)), total_weight_(0.0) {
  if (!(dt_ > 0.0)) throw ConfigError("ControlEnsemble: dt must be > 0");
  if (members_.empty()) throw ConfigError("ControlEnsemble: no members");
  for (const auto& m : members_) {
    if (!(m.weight >= 0.0)) throw ConfigError("ControlEnsemble: negative weight");
    total_weight_ += m.weight;
  }
  if (!(total_weight_ > 0.0)) throw ConfigError("ControlEnsemble: zero total weight");
}

std::vector<double> ControlEnsemble::member_fidelities(const std::vector<double>& q,
                                                       int threads) const {
  std::vector<double> out(members_.size());
  parallel_for(members_.size(), threads,
               [&](std::size_t i) { out[i] = member_fidelity(members_[i], dt_, q); });
  return out;
}

double ControlEnsemble::fidelity(const std::vector<double>& q, int threads) const {
  const auto per = member_fidelities(q, threads);
  double sum = 0.0;
  for (std::size_t i = 0; i < per.size(); ++i) sum += members_[i].weight * per[i];
  return sum / total_weight_;
}

double ControlEnsemble::fidelity_and_gradient(const std::vector<double>& q,
                                              std::vector<double>& gradient,
                                              int threads) const {
  std::vector<MemberEvaluation> evals(members_.size());
  parallel_for(members_.size(), threads,
               [&](std::size_t i) { evals[i] = member_gradient(members_[i], dt_, q); });
  gradient.assign(q.size(), 0.0);
  double sum = 0.0;
  // Fixed summation order keeps results independent of the thread count.
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const double w = members_[i].weight / total_weight_;
    sum += w * evals[i].fidelity;
    for (std::size_t k = 0; k < q.size(); ++k) gradient[k] += w * evals[i].gradient[k];
  }
  return sum;
}

ControlEnsemble make_sym3_ensemble(const GrapeConfig& config, const GateSystem& system) {
  config.validate();
  std::vector<EnsembleMember> members;
  for (double f : config.f_omega_grid) {
    for (double offset : config.delta_offset_grid_hz) {
      const auto h = h_sym3({system.delta + units::hz_to_rad(offset), 0.0, 0.0, system.v});
      members.push_back({h.drift / units::kHbar, 0.5 * h.control_x, 0.5 * h.control_y,
                         target_sym3(), f, 1.0});
    }
  }
  return ControlEnsemble(config.dt, std::move(members));
}

double ensemble_fidelity(const Pulse& controls, const GrapeConfig& config,
                         const GateSystem& system) {
  return make_sym3_ensemble(config, system).fidelity(controls.quadratures(), config.threads);
}

std::vector<double> fidelity_gradient(const Pulse& controls, const GrapeConfig& config,
                                      const GateSystem& system) {
  std::vector<double> grad;
  make_sym3_ensemble(config, system)
      .fidelity_and_gradient(controls.quadratures(), grad, config.threads);
  return grad;
}

nlohmann::json OptimizationReport::to_json() const {
  nlohmann::json grid_json = nlohmann::json::array();
  for (const auto& g : grid) {
    grid_json.push_back(
        {{"f_omega", g.f_omega}, {"delta_offset_hz", g.delta_offset_hz}, {"fidelity", g.fidelity}});
  }
  return {{"final_fidelity", final_fidelity},
          {"grid", grid_json},
          {"iterations", iterations},
          {"evaluations", evaluations},
          {"converged", converged},
          {"stop_reason", stop_reason},
          {"initial_seed", initial_seed},
          {"screen_fidelities", screen_fidelities},
          {"fidelity_history", fidelity_history},
          {"grad_norm_history", grad_norm_history}};
}

Pulse random_initial_pulse(const GrapeConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PulseStep> steps(static_cast<std::size_t>(config.n_steps));
  for (auto& s : steps) {
    s.amplitude = 0.1 * config.omega_cap * unit(rng);
    s.phase = units::kTwoPi * unit(rng);
  }
  return Pulse(config.dt, std::move(steps));
}

std::vector<std::uint64_t> candidate_seeds(const GrapeConfig& config) {
  std::vector<std::uint64_t> seeds{config.rng_seed};
  std::mt19937_64 rng(config.rng_seed);
  while (seeds.size() < static_cast<std::size_t>(config.restarts)) seeds.push_back(rng());
  return seeds;
}

namespace {

QuasiNewtonResult run_bfgs(const FidelityObjective& ensemble, const GrapeConfig& config,
                           const RVector& z0, int max_iters) {
  const double cap = config.omega_cap;
  std::vector<double> q(static_cast<std::size_t>(z0.size()));
  std::vector<double> grad;
  const ValueAndGradient objective = [&](const RVector& z, RVector& g) {
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = cap * z(static_cast<Eigen::Index>(k));
    const double f = ensemble.fidelity_and_gradient(q, grad, config.threads);
    g.resize(z.size());
    for (std::size_t k = 0; k < q.size(); ++k) g(static_cast<Eigen::Index>(k)) = cap * grad[k];
    return f;
  };
  QuasiNewtonOptions options;
  options.max_iters = max_iters;
  options.grad_tol = config.grad_tol;
  options.radius = 1.0;
  return maximize_disk_bfgs(objective, z0, options);
}

RVector scaled_controls(const Pulse& pulse, double cap) {
  const auto q = pulse.quadratures();
  RVector z(static_cast<Eigen::Index>(q.size()));
  for (std::size_t k = 0; k < q.size(); ++k) z(static_cast<Eigen::Index>(k)) = q[k] / cap;
  return z;
}

}  // namespace

GrapeResult optimize_ensemble(const FidelityObjective& ensemble, const GrapeConfig& config,
                              const std::optional<Pulse>& initial) {
  config.validate();
  const double cap = config.omega_cap;
  std::vector<double> screen_values;
  std::uint64_t chosen_seed = config.rng_seed;
  QuasiNewtonResult screened;
  bool have_screened = false;
  RVector z0;
  if (initial) {
    if (initial->size() != static_cast<std::size_t>(config.n_steps) ||
        initial->dt() != config.dt) {
      throw ConfigError("grape: initial pulse does not match n_steps/dt");
    }
    z0 = scaled_controls(*initial, cap);
  } else if (config.restarts == 1 || config.screen_iters == 0) {
    z0 = scaled_controls(random_initial_pulse(config, config.rng_seed), cap);
  } else {
    for (std::uint64_t seed : candidate_seeds(config)) {
      auto candidate = run_bfgs(ensemble, config,
                                scaled_controls(random_initial_pulse(config, seed), cap),
                                std::min(config.screen_iters, config.max_iters));
      screen_values.push_back(candidate.value);
      if (!have_screened || candidate.value > screened.value) {
        screened = std::move(candidate);
        chosen_seed = seed;
        have_screened = true;
      }
    }
    z0 = screened.x;
  }

  auto qn = run_bfgs(ensemble, config, z0, config.max_iters);
  if (have_screened) {
    // Splice the screening history of the chosen candidate in front.
    qn.value_history.insert(qn.value_history.begin(), screened.value_history.begin(),
                            screened.value_history.end() - 1);
    qn.grad_norm_history.insert(qn.grad_norm_history.begin(),
                                screened.grad_norm_history.begin(),
                                screened.grad_norm_history.end() - 1);
    qn.iterations += screened.iterations;
    qn.evaluations += screened.evaluations;
  }

  std::vector<PulseStep> steps(static_cast<std::size_t>(config.n_steps));
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const double x = cap * qn.x(static_cast<Eigen::Index>(2 * j));
    const double y = cap * qn.x(static_cast<Eigen::Index>(2 * j + 1));
    steps[j] = {std::min(std::hypot(x, y), cap), std::atan2(y, x)};
  }
  GrapeResult result{Pulse(config.dt, std::move(steps)), {}};
  result.pulse.meta() = {{"generator", "grape"},
                         {"rng_seed", config.rng_seed},
                         {"initial_seed", chosen_seed},
                         {"omega_cap_hz", units::rad_to_hz(cap)}};
  auto& report = result.report;
  report.final_fidelity = qn.value;
  report.iterations = qn.iterations;
  report.evaluations = qn.evaluations;
  report.converged = qn.converged;
  report.stop_reason = qn.stop_reason;
  report.initial_seed = chosen_seed;
  report.screen_fidelities = std::move(screen_values);
  report.fidelity_history = std::move(qn.value_history);
  report.grad_norm_history = std::move(qn.grad_norm_history);
  return result;
}

double bell4_fidelity(const Pulse& pulse, const GateSystem& system, double f_omega,
                      double delta_offset_hz) {
  const auto h = two_molecule_system(Basis::bell4,
                                     system.delta + units::hz_to_rad(delta_offset_hz), system.v);
  return gate_fidelity(propagate(pulse, h, f_omega));
}

GrapeResult grape_optimize(const GrapeConfig& config, const GateSystem& system,
                           const std::optional<Pulse>& initial) {
  auto result = optimize_ensemble(make_sym3_ensemble(config, system), config, initial);
  for (double f : config.f_omega_grid) {
    for (double offset : config.delta_offset_grid_hz) {
      result.report.grid.push_back({f, offset, bell4_fidelity(result.pulse, system, f, offset)});
    }
  }
  return result;
}

double FidelityMap::min() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

FidelityMap robustness_scan(const Pulse& pulse, const GateSystem& system,
                            const std::vector<double>& delta_err_grid_hz,
                            const std::vector<double>& f_omega_grid, int threads) {
  if (delta_err_grid_hz.empty() || f_omega_grid.empty()) {
    throw ConfigError("robustness_scan: grids must be non-empty");
  }
  FidelityMap map{delta_err_grid_hz, f_omega_grid,
                  std::vector<double>(delta_err_grid_hz.size() * f_omega_grid.size())};
  const std::size_t nd = delta_err_grid_hz.size();
  parallel_for(map.values.size(), threads, [&](std::size_t k) {
    map.values[k] = bell4_fidelity(pulse, system, f_omega_grid[k / nd], delta_err_grid_hz[k % nd]);
  });
  return map;
}

}  // namespace polargate
