#include "polargate/motional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "polargate/errors.hpp"
#include "polargate/parallel.hpp"
#include "polargate/quadrature.hpp"
#include "polargate/units.hpp"

namespace polargate {

namespace {

constexpr double kUnitaryTol = 1e-9;

// Product internal order {|11>,|10>,|01>,|00>}.
constexpr std::array<InternalPair, 4> kProductOrder{{{1, 1}, {1, 0}, {0, 1}, {0, 0}}};

bool is_exchange_pair(const InternalPair& bra, const InternalPair& ket) {
  return (bra.s_a == 1 && bra.s_b == 0 && ket.s_a == 0 && ket.s_b == 1) ||
         (bra.s_a == 0 && bra.s_b == 1 && ket.s_a == 1 && ket.s_b == 0);
}

void check_motion_index(int m) {
  if (m < 0 || m > 2) throw DomainError("motional index must be 0, 1 or 2");
}

void check_internal(const InternalPair& p) {
  if ((p.s_a != 0 && p.s_a != 1) || (p.s_b != 0 && p.s_b != 1)) {
    throw DomainError("internal states must be 0 or 1");
  }
}

// Motional energy (J) relative to the zero-point energy of the |0> traps.
// Maximizes sum_b w_b |s3_b + e^{-i beta} u44_b| over beta.
double absorbed_beta(const std::array<Complex, 3>& s3, const std::array<Complex, 3>& u44,
                     const std::array<double, 3>& w) {
  auto objective = [&](double beta) {
    const Complex phase = std::exp(Complex(0.0, -beta));
    double sum = 0.0;
    for (std::size_t b = 0; b < 3; ++b) sum += w[b] * std::abs(s3[b] + phase * u44[b]);
    return sum;
  };
  constexpr int kGrid = 720;
  const double step = units::kTwoPi / kGrid;
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < kGrid; ++k) {
    const double v = objective(k * step);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  // Golden-section refinement inside the bracketing grid cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = (best - 1) * step;
  double hi = (best + 1) * step;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = objective(d);
    }
  }
  // Golden section stalls near sqrt(eps); polish on the stationarity condition.
  auto slope = [&](double beta) {
    const Complex phase = std::exp(Complex(0.0, -beta));
    double sum = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      const Complex z = s3[b] + phase * u44[b];
      const double mag = std::abs(z);
      if (mag > 0.0) {
        sum += w[b] * std::real(std::conj(z) * Complex(0.0, -1.0) * phase * u44[b]) / mag;
      }
    }
    return sum;
  };
  const double mid = 0.5 * (lo + hi);
  double x0 = mid;
  double x1 = x0 + 1e-6;
  double g0 = slope(x0);
  for (int it = 0; it < 6; ++it) {
    const double g1 = slope(x1);
    if (g1 == g0 || g1 == 0.0) break;
    const double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
    if (!(std::abs(x2 - mid) < step)) break;
    x0 = x1;
    g0 = g1;
    x1 = x2;
  }
  // Values are flat to rounding here, so the slope decides.
  double beta = std::abs(slope(x1)) <= std::abs(slope(mid)) ? x1 : mid;
  beta = std::remainder(beta, units::kTwoPi);
  if (objective(beta) < best_value) return std::remainder(best * step, units::kTwoPi);
  return beta;
}

std::array<double, 3> normalized_weights(const std::optional<std::array<double, 3>>& weights,
                                         const char* where) {
  std::array<double, 3> w{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  if (!weights) return w;
  double total = 0.0;
  for (double x : *weights) {
    if (!(x >= 0.0)) throw ConfigError(std::string(where) + ": weights must be >= 0");
    total += x;
  }
  if (!(total > 0.0)) throw ConfigError(std::string(where) + ": weights sum to zero");
  for (std::size_t b = 0; b < 3; ++b) w[b] = (*weights)[b] / total;
  return w;
}

double motional_energy(const TrapConfig& trap, const InternalPair& s, const MotionalState& n) {
  const double fa = trap.frequency(0, s.s_a);
  const double fb = trap.frequency(1, s.s_b);
  return units::kPlanck * ((n.n_a + 0.5) * fa + (n.n_b + 0.5) * fb -
                           0.5 * (trap.f_trap_a + trap.f_trap_b));
}

struct AxisRule {
  std::vector<double> x;       // positions, m
  std::vector<double> weight;  // quadrature weight times both polynomial factors
};

// One axis of <n_bra, a_bra | f(x) | n_ket, a_ket> with the Gaussian factors
// absorbed into the Gauss-Hermite weight.
AxisRule axis_rule(int order, int n_bra, double a_bra, int n_ket, double a_ket) {
  const auto& gh = gauss_hermite(order);
  const double s = std::sqrt(2.0 / (1.0 / (a_bra * a_bra) + 1.0 / (a_ket * a_ket)));
  AxisRule rule;
  rule.x.resize(gh.nodes.size());
  rule.weight.resize(gh.nodes.size());
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    const double x = s * gh.nodes[i];
    rule.x[i] = x;
    rule.weight[i] = s * gh.weights[i] * oscillator_polynomial(n_bra, x / a_bra, a_bra) *
                     oscillator_polynomial(n_ket, x / a_ket, a_ket);
  }
  return rule;
}

double integrate_ddi(const MotionalKet& bra, const MotionalKet& ket, const TrapConfig& trap,
                     double prefactor, int order) {
  const auto& nb = kMotionalBasis[static_cast<std::size_t>(bra.motion)];
  const auto& nk = kMotionalBasis[static_cast<std::size_t>(ket.motion)];
  const AxisRule ra = axis_rule(order, nb.n_a, trap.oscillator_length(0, bra.internal.s_a),
                                nk.n_a, trap.oscillator_length(0, ket.internal.s_a));
  const AxisRule rb = axis_rule(order, nb.n_b, trap.oscillator_length(1, bra.internal.s_b),
                                nk.n_b, trap.oscillator_length(1, ket.internal.s_b));
  double sum = 0.0;
  for (std::size_t i = 0; i < ra.x.size(); ++i) {
    double inner = 0.0;
    for (std::size_t k = 0; k < rb.x.size(); ++k) {
      const double r = trap.r_e + rb.x[k] - ra.x[i];
      // Nodes past the collision point carry negligible weight.
      if (r <= 0.0) continue;
      inner += rb.weight[k] / (r * r * r);
    }
    sum += ra.weight[i] * inner;
  }
  return prefactor * sum;
}

}  // namespace

void TrapConfig::validate() const {
  if (!(f_trap_a > 0.0) || !(f_trap_b > 0.0)) {
    throw ConfigError("TrapConfig: trap frequencies must be > 0");
  }
  if (!(std::abs(delta_f_trap) < 0.1 * std::min(f_trap_a, f_trap_b))) {
    throw ConfigError("TrapConfig: |delta_f_trap| must be much smaller than f_trap");
  }
  if (!(r_e > 0.0)) throw ConfigError("TrapConfig: r_e must be > 0");
  if (!(mass > 0.0)) throw ConfigError("TrapConfig: mass must be > 0");
}

double TrapConfig::frequency(int molecule, int internal_state) const {
  const double f = molecule == 0 ? f_trap_a : f_trap_b;
  return f + (internal_state == 1 ? delta_f_trap : 0.0);
}

double TrapConfig::oscillator_length(int molecule, int internal_state) const {
  return std::sqrt(units::kHbar / (mass * units::kTwoPi * frequency(molecule, internal_state)));
}

bool TrapConfig::well_separated(double ratio) const {
  double a = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int s = 0; s < 2; ++s) a = std::max(a, oscillator_length(j, s));
  }
  return a < ratio * r_e;
}

nlohmann::json TrapConfig::to_json() const {
  return {{"f_trap_a_hz", f_trap_a},
          {"f_trap_b_hz", f_trap_b},
          {"delta_f_trap_hz", delta_f_trap},
          {"r_e_m", r_e},
          {"mass_kg", mass}};
}

std::string_view motional_label(int index) {
  check_motion_index(index);
  static constexpr std::array<std::string_view, 3> labels{"00", "01", "10"};
  return labels[static_cast<std::size_t>(index)];
}

std::string_view internal_label(const InternalPair& pair) {
  check_internal(pair);
  static constexpr std::array<std::string_view, 4> labels{"00", "01", "10", "11"};
  return labels[static_cast<std::size_t>(2 * pair.s_a + pair.s_b)];
}

double ddi_matrix_element(const MotionalKet& bra, const MotionalKet& ket, const TrapConfig& trap,
                          double d10, const QuadratureOptions& options) {
  check_internal(bra.internal);
  check_internal(ket.internal);
  check_motion_index(bra.motion);
  check_motion_index(ket.motion);
  if (!is_exchange_pair(bra.internal, ket.internal)) return 0.0;
  trap.validate();
  if (!(d10 >= 0.0)) throw DomainError("ddi_matrix_element: d10 must be >= 0");
  const double prefactor = options.eta * d10 * d10 / (4.0 * std::numbers::pi * units::kEpsilon0);
  const double value = integrate_ddi(bra, ket, trap, prefactor, options.order);
  const double check = integrate_ddi(bra, ket, trap, prefactor, 2 * options.order);
  if (!(std::abs(units::joule_to_hz(value - check)) < options.tolerance_hz)) {
    throw NumericalError("ddi_matrix_element: quadrature not converged at order " +
                         std::to_string(options.order));
  }
  return value;
}

DdiTable DdiTable::compute(const TrapConfig& trap, double d10, const QuadratureOptions& options) {
  DdiTable table{RMatrix::Zero(3, 3)};
  for (int m = 0; m < 3; ++m) {
    for (int mp = 0; mp < 3; ++mp) {
      table.values(m, mp) = ddi_matrix_element({{1, 0}, m}, {{0, 1}, mp}, trap, d10, options);
    }
  }
  return table;
}

HamiltonianSpec h_motional12(const DriveParams& drive, const TrapConfig& trap,
                             const DdiTable& table, const MotionalOptions& options) {
  trap.validate();
  if (table.values.rows() != 3 || table.values.cols() != 3) {
    throw ConfigError("h_motional12: DDI table must be 3x3");
  }
  const auto internal = h_two(Basis::product4, {drive.delta, drive.omega_x, drive.omega_y, 0.0});
  const CMatrix id3 = CMatrix::Identity(3, 3);

  CMatrix drift = kron(internal.drift, id3);
  for (int p = 0; p < 4; ++p) {
    for (int m = 0; m < 3; ++m) {
      drift(3 * p + m, 3 * p + m) +=
          motional_energy(trap, kProductOrder[static_cast<std::size_t>(p)],
                          kMotionalBasis[static_cast<std::size_t>(m)]);
    }
  }
  // |10> is product index 1, |01> is index 2.
  for (int m = 0; m < 3; ++m) {
    for (int mp = 0; mp < 3; ++mp) {
      if (!options.include_couplings && m != mp) continue;
      const double v = table.values(m, mp);
      drift(3 * 1 + m, 3 * 2 + mp) += v;
      drift(3 * 2 + mp, 3 * 1 + m) += v;
    }
  }

  const CMatrix w = kron(product_to_bell(), id3);
  HamiltonianSpec spec;
  spec.basis = Basis::motional12;
  spec.drift = w.adjoint() * drift * w;
  spec.control_x = w.adjoint() * kron(internal.control_x, id3) * w;
  spec.control_y = w.adjoint() * kron(internal.control_y, id3) * w;
  spec.omega_x = drive.omega_x;
  spec.omega_y = drive.omega_y;
  spec.validate();
  return spec;
}

HamiltonianSpec h_motional12(const DriveParams& drive, const TrapConfig& trap,
                             const SpeciesParams& species, const MotionalOptions& options) {
  return h_motional12(drive, trap, DdiTable::compute(trap, species.d10), options);
}

CMatrix motional_block(const CMatrix& u12, int motion) {
  check_motion_index(motion);
  if (u12.rows() != 12 || u12.cols() != 12) throw ConfigError("motional_block: need 12x12");
  CMatrix block(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) block(i, j) = u12(3 * i + motion, 3 * j + motion);
  }
  return block;
}

nlohmann::json MotionalFidelityResult::to_json() const {
  return {{"fidelity", fidelity},
          {"block_fidelities", block_fidelities},
          {"block_phases_rad", block_phases},
          {"beta_rad", beta}};
}

MotionalFidelityResult motional_fidelity(const Propagator& u12,
                                         const std::optional<std::array<double, 3>>& weights,
                                         BetaPolicy policy) {
  if (u12.dim() != 12) throw ConfigError("motional_fidelity: propagator must be 12x12");
  if (unitarity_defect(u12.matrix) > kUnitaryTol) {
    throw NumericalError("motional_fidelity: propagator is not unitary");
  }
  const auto w = normalized_weights(weights, "motional_fidelity");

  std::array<Complex, 3> s3{};
  std::array<Complex, 3> u44{};
  for (int b = 0; b < 3; ++b) {
    const CMatrix block = motional_block(u12.matrix, b);
    s3[b] = (target_sym3().adjoint() * block.topLeftCorner(3, 3)).trace();
    u44[b] = block(3, 3);
  }
  const double beta =
      policy.kind == BetaPolicy::Kind::absorb ? absorbed_beta(s3, u44, w) : policy.beta;

  MotionalFidelityResult result;
  result.beta = beta;
  const Complex phase = std::exp(Complex(0.0, -beta));
  double sum = 0.0;
  for (std::size_t b = 0; b < 3; ++b) {
    const Complex z = s3[b] + phase * u44[b];
    result.block_phases[b] = std::arg(z);
    result.block_fidelities[b] = std::min(1.0, std::norm(z / 4.0));
    sum += w[b] * std::abs(z);
  }
  result.fidelity = std::min(1.0, (sum / 4.0) * (sum / 4.0));
  return result;
}

std::array<double, 3> thermal_weights(double temperature, const TrapConfig& trap) {
  if (!(temperature >= 0.0)) throw DomainError("thermal_weights: temperature must be >= 0");
  trap.validate();
  if (temperature == 0.0) return {1.0, 0.0, 0.0};
  std::array<double, 3> p{};
  double total = 0.0;
  for (std::size_t b = 0; b < 3; ++b) {
    const auto& n = kMotionalBasis[b];
    const double e = units::kPlanck * (n.n_a * trap.f_trap_a + n.n_b * trap.f_trap_b);
    p[b] = std::exp(-e / (units::kBoltzmann * temperature));
    total += p[b];
  }
  for (double& x : p) x /= total;
  return p;
}

double population_transfer_estimate(double coupling, double gap) {
  if (gap == 0.0) throw DomainError("population_transfer_estimate: zero gap");
  const double r = coupling / gap;
  return r * r;
}

std::array<BlockSystem, 3> motional_block_systems(double delta, const TrapConfig& trap,
                                                  const DdiTable& table) {
  std::array<BlockSystem, 3> blocks{};
  for (std::size_t b = 0; b < 3; ++b) {
    const auto& n = kMotionalBasis[b];
    const double split_hz = trap.delta_f_trap * (1.0 + n.n_a + n.n_b);
    blocks[b] = {delta + units::hz_to_rad(0.5 * split_hz),
                 table.values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b))};
  }
  return blocks;
}

double motional_nominal_delta(const TrapConfig& trap, const DdiTable& table) {
  return units::joule_to_rad(table.values(0, 0)) - units::hz_to_rad(0.5 * trap.delta_f_trap);
}

MotionalFidelityResult motional_pulse_fidelity(const Pulse& pulse, double delta,
                                               const TrapConfig& trap, const DdiTable& table,
                                               double f_omega, double delta_offset_hz,
                                               const MotionalOptions& options) {
  const auto h = h_motional12({delta + units::hz_to_rad(delta_offset_hz), 0.0, 0.0, 0.0}, trap,
                              table, options);
  return motional_fidelity(propagate(pulse, h, f_omega));
}

MotionalEnsemble::MotionalEnsemble(const GrapeConfig& config, double delta,
                                   const TrapConfig& trap, const DdiTable& table,
                                   const std::optional<std::array<double, 3>>& weights)
    : dt_(config.dt), weights_(normalized_weights(weights, "MotionalEnsemble")) {
  config.validate();
  trap.validate();
  for (double f : config.f_omega_grid) {
    for (double offset : config.delta_offset_grid_hz) {
      const auto h = h_motional12({delta + units::hz_to_rad(offset), 0.0, 0.0, 0.0}, trap, table,
                                  {false});
      std::array<EnsembleMember, 3> point;
      for (int b = 0; b < 3; ++b) {
        point[static_cast<std::size_t>(b)] = {motional_block(h.drift, b) / units::kHbar,
                                              0.5 * motional_block(h.control_x, b),
                                              0.5 * motional_block(h.control_y, b),
                                              CMatrix::Identity(4, 4), f, 1.0};
      }
      points_.push_back(std::move(point));
    }
  }
}

double MotionalEnsemble::fidelity(const std::vector<double>& q, int threads) const {
  std::vector<double> unused;
  return fidelity_and_gradient(q, unused, threads);
}

double MotionalEnsemble::fidelity_and_gradient(const std::vector<double>& q,
                                               std::vector<double>& gradient,
                                               int threads) const {
  static const std::vector<CMatrix> probes = [] {
    CMatrix sym = CMatrix::Zero(4, 4);
    sym.topLeftCorner(3, 3) = target_sym3();
    CMatrix last = CMatrix::Zero(4, 4);
    last(3, 3) = 1.0;
    return std::vector<CMatrix>{sym, last};
  }();
  const std::size_t n_members = 3 * points_.size();
  std::vector<OverlapEvaluation> evals(n_members);
  parallel_for(n_members, threads, [&](std::size_t i) {
    evals[i] = overlap_gradients(points_[i / 3][i % 3], dt_, q, probes);
  });

  gradient.assign(q.size(), 0.0);
  double total = 0.0;
  const double norm = 1.0 / static_cast<double>(points_.size());
  for (std::size_t p = 0; p < points_.size(); ++p) {
    std::array<Complex, 3> s3{};
    std::array<Complex, 3> u44{};
    for (std::size_t b = 0; b < 3; ++b) {
      s3[b] = evals[3 * p + b].values[0];
      u44[b] = evals[3 * p + b].values[1];
    }
    // The gradient at the optimal beta is the gradient of the maximum.
    const Complex phase = std::exp(Complex(0.0, -absorbed_beta(s3, u44, weights_)));
    double sum = 0.0;
    std::array<Complex, 3> z{};
    for (std::size_t b = 0; b < 3; ++b) {
      z[b] = s3[b] + phase * u44[b];
      sum += weights_[b] * std::abs(z[b]);
    }
    total += norm * (sum / 4.0) * (sum / 4.0);
    const double outer = norm * sum / 8.0;
    for (std::size_t b = 0; b < 3; ++b) {
      const double mag = std::abs(z[b]);
      if (mag == 0.0) continue;
      const auto& e = evals[3 * p + b];
      const Complex c = std::conj(z[b]) * (outer * weights_[b] / mag);
      for (std::size_t k = 0; k < q.size(); ++k) {
        gradient[k] += std::real(c * (e.gradients[0][k] + phase * e.gradients[1][k]));
      }
    }
  }
  return total;
}

MotionalGrapeResult grape_motional(const GrapeConfig& config, const TrapConfig& trap,
                                   const SpeciesParams& species, std::optional<double> delta,
                                   const std::optional<Pulse>& initial) {
  config.validate();
  trap.validate();
  const DdiTable table = DdiTable::compute(trap, species.d10);
  const double nominal = delta ? *delta : motional_nominal_delta(trap, table);
  auto optimized =
      optimize_ensemble(MotionalEnsemble(config, nominal, trap, table), config, initial);
  MotionalGrapeResult result{std::move(optimized.pulse), std::move(optimized.report), nominal, {}};
  result.pulse.meta()["generator"] = "grape_motional";
  result.pulse.meta()["delta_hz"] = units::rad_to_hz(nominal);

  const std::size_t nd = config.delta_offset_grid_hz.size();
  const std::size_t count = config.f_omega_grid.size() * nd;
  result.grid.resize(count);
  parallel_for(count, config.threads, [&](std::size_t k) {
    result.grid[k] = motional_pulse_fidelity(result.pulse, nominal, trap, table,
                                             config.f_omega_grid[k / nd],
                                             config.delta_offset_grid_hz[k % nd]);
  });
  for (std::size_t k = 0; k < count; ++k) {
    result.report.grid.push_back({config.f_omega_grid[k / nd], config.delta_offset_grid_hz[k % nd],
                                  result.grid[k].fidelity});
  }
  return result;
}

MotionalMap motional_scan(const Pulse& pulse, double delta, const TrapConfig& trap,
                          const DdiTable& table, const std::vector<double>& delta_err_grid_hz,
                          const std::vector<double>& f_omega_grid, int threads) {
  if (delta_err_grid_hz.empty() || f_omega_grid.empty()) {
    throw ConfigError("motional_scan: grids must be non-empty");
  }
  const std::size_t nd = delta_err_grid_hz.size();
  const std::size_t count = nd * f_omega_grid.size();
  MotionalMap out{{delta_err_grid_hz, f_omega_grid, std::vector<double>(count)},
                  std::vector<std::array<double, 3>>(count)};
  parallel_for(count, threads, [&](std::size_t k) {
    const auto r = motional_pulse_fidelity(pulse, delta, trap, table, f_omega_grid[k / nd],
                                           delta_err_grid_hz[k % nd]);
    out.map.values[k] = r.fidelity;
    out.block_phases[k] = r.block_phases;
  });
  return out;
}

}  // namespace polargate
