#include "polargate/propagation.hpp"

#include <cmath>
#include <stdexcept>

#include "polargate/errors.hpp"
#include "polargate/parallel.hpp"
#include "polargate/units.hpp"

namespace polargate {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kUnitaryTol = 1e-9;

}  // namespace

CMatrix target_gate(double beta) {
  CMatrix t = CMatrix::Zero(4, 4);
  t(0, 1) = 1.0;
  t(1, 0) = -1.0;
  t(2, 2) = 1.0;
  t(3, 3) = std::polar(1.0, beta);
  return t;
}

const CMatrix& target_sym3() {
  static const CMatrix t = target_gate(0.0).topLeftCorner(3, 3);
  return t;
}

Propagator expm_step(const CMatrix& h, Basis basis, double dt) {
  if (!(dt > 0.0)) throw DomainError("expm_step: dt must be > 0");
  require_hermitian(h, kHermitianTol, "expm_step");
  return {expm_hermitian(h / units::kHbar, dt), basis, false};
}

Propagator propagate(const Pulse& pulse, const HamiltonianSpec& system, double amplitude_factor) {
  system.validate();
  const auto n = system.dim();
  Propagator out{CMatrix::Identity(n, n), system.basis, pulse.empty()};
  const CMatrix drift = system.drift / units::kHbar;
  const CMatrix cx = 0.5 * system.control_x;
  const CMatrix cy = 0.5 * system.control_y;
  for (const auto& step : pulse.steps()) {
    const double ox = amplitude_factor * step.omega_x();
    const double oy = amplitude_factor * step.omega_y();
    const CMatrix h = drift + ox * cx + oy * cy;
    out.matrix = expm_hermitian(h, pulse.dt()) * out.matrix;
  }
  return out;
}

Propagator propagate(const GaussianPulse& pulse, double v, Basis basis, double step) {
  return propagate(pulse.discretize(step), two_molecule_system(basis, pulse.delta, v));
}

HamiltonianSpec two_molecule_system(Basis basis, double delta, double v) {
  const DriveParams drive{delta, 0.0, 0.0, v};
  if (basis == Basis::sym3) return h_sym3(drive);
  return h_two(basis, drive);
}

GateScore score_gate(const Propagator& u, BetaPolicy policy) {
  if (unitarity_defect(u.matrix) > kUnitaryTol) {
    throw NumericalError("score_gate: propagator is not unitary");
  }
  GateScore score;
  if (u.dim() == 3) {
    const Complex z = (target_sym3().adjoint() * u.matrix).trace() / 3.0;
    score.overlap = z;
    score.fidelity = std::norm(z);
    return score;
  }
  if (u.dim() != 4 || (u.basis != Basis::bell4 && u.basis != Basis::product4)) {
    throw ConfigError("score_gate: expected a sym3, bell4 or product4 propagator");
  }
  CMatrix m = u.matrix;
  if (u.basis == Basis::product4) {
    const CMatrix& w = product_to_bell();
    m = w.adjoint() * m * w;
  }
  // tr(T(beta)^dagger U) = s3 + e^{-i beta} u44
  const Complex s3 = (target_sym3().adjoint() * m.topLeftCorner(3, 3)).trace();
  const Complex u44 = m(3, 3);
  double beta = policy.beta;
  if (policy.kind == BetaPolicy::Kind::absorb) {
    beta = std::arg(u44) - (std::abs(s3) > 0.0 ? std::arg(s3) : 0.0);
    beta = std::remainder(beta, units::kTwoPi);
  }
  const Complex z = (s3 + std::polar(1.0, -beta) * u44) / 4.0;
  score.overlap = z;
  score.beta = beta;
  score.fidelity = std::norm(z);
  return score;
}

double gate_fidelity(const Propagator& u, BetaPolicy policy) {
  return score_gate(u, policy).fidelity;
}

double minimum_resolvable_gate_time(double v) {
  if (v == 0.0) return std::numeric_limits<double>::infinity();
  return units::kTwoPi * units::kHbar / std::abs(v);
}

bool gate_time_resolves(double tau_gate, double v) {
  return tau_gate >= minimum_resolvable_gate_time(v);
}

std::vector<ErrorScanPoint> gaussian_error_scan(const GaussianPulse& base, double v,
                                                const std::vector<double>& delta_error_grid_hz,
                                                int threads, double step) {
  if (delta_error_grid_hz.empty()) throw ConfigError("gaussian_error_scan: empty grid");
  base.validate();
  const Pulse pulse = base.discretize(step);
  std::vector<ErrorScanPoint> out(delta_error_grid_hz.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const double eps = delta_error_grid_hz[i];
    const auto system =
        two_molecule_system(Basis::bell4, base.delta + units::hz_to_rad(eps), v);
    out[i] = {eps, gate_fidelity(propagate(pulse, system))};
  });
  return out;
}

}  // namespace polargate
