#include "polargate/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "polargate/errors.hpp"
#include "polargate/units.hpp"

namespace polargate {

namespace {

constexpr double kHermitianTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

CMatrix pauli_x() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = -kI;
  m(1, 0) = kI;
  return m;
}

CMatrix pauli_z() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

// Builds drift and the two control generators in the product basis
// {|11>,|10>,|01>,|00>}: molecule A is the left tensor factor and each
// single-molecule basis is ordered {|1>,|0>}.
void product4_parts(const DriveParams& drive, CMatrix& drift, CMatrix& cx, CMatrix& cy) {
  const CMatrix id = CMatrix::Identity(2, 2);
  const double hbar = units::kHbar;
  drift = 0.5 * hbar * drive.delta * (kron(pauli_z(), id) + kron(id, pauli_z()));
  // Exchange-only DDI in the RWA: V (s+ s- + s- s+).
  drift(1, 2) += drive.v;
  drift(2, 1) += drive.v;
  cx = kron(pauli_x(), id) + kron(id, pauli_x());
  cy = kron(pauli_y(), id) + kron(id, pauli_y());
}

}  // namespace

std::string_view to_string(Basis basis) {
  switch (basis) {
    case Basis::single: return "single";
    case Basis::sym3: return "sym3";
    case Basis::product4: return "product4";
    case Basis::bell4: return "bell4";
    case Basis::motional12: return "motional12";
  }
  return "unknown";
}

Basis parse_basis(std::string_view label) {
  for (Basis b : {Basis::single, Basis::sym3, Basis::product4, Basis::bell4, Basis::motional12}) {
    if (to_string(b) == label) return b;
  }
  throw ConfigError("unknown basis label '" + std::string(label) + "'");
}

int basis_dimension(Basis basis) {
  switch (basis) {
    case Basis::single: return 2;
    case Basis::sym3: return 3;
    case Basis::product4:
    case Basis::bell4: return 4;
    case Basis::motional12: return 12;
  }
  return 0;
}

void DipoleGeometry::validate() const {
  if (!(r_e > 0.0)) throw DomainError("DipoleGeometry: r_e must be > 0");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("DipoleGeometry: theta must lie in [0, pi]");
  }
}

double DriveParams::rabi() const { return std::hypot(omega_x, omega_y); }

CMatrix HamiltonianSpec::matrix_at(double ox, double oy) const {
  const double hbar = units::kHbar;
  return drift + (0.5 * hbar * ox) * control_x + (0.5 * hbar * oy) * control_y;
}

void HamiltonianSpec::validate() const {
  const auto n = drift.rows();
  if (drift.cols() != n || control_x.rows() != n || control_x.cols() != n ||
      control_y.rows() != n || control_y.cols() != n) {
    throw NumericalError("HamiltonianSpec: inconsistent dimensions");
  }
  if (n != basis_dimension(basis)) {
    throw NumericalError("HamiltonianSpec: dimension does not match basis label");
  }
  require_hermitian(drift, kHermitianTol, "HamiltonianSpec drift");
  require_hermitian(control_x, kHermitianTol, "HamiltonianSpec control_x");
  require_hermitian(control_y, kHermitianTol, "HamiltonianSpec control_y");
}

double vddi_point(double d10, double r) {
  if (!(r > 0.0)) throw DomainError("vddi_point: separation must be > 0");
  if (d10 < 0.0) throw DomainError("vddi_point: dipole must be >= 0");
  return d10 * d10 / (4.0 * std::numbers::pi * units::kEpsilon0 * r * r * r);
}

double geometry_factor(double theta) {
  const double c = std::cos(theta);
  return 1.0 - 3.0 * c * c;
}

HamiltonianSpec h_single(const DriveParams& drive) {
  HamiltonianSpec spec;
  spec.basis = Basis::single;
  spec.drift = 0.5 * units::kHbar * drive.delta * pauli_z();
  spec.control_x = pauli_x();
  spec.control_y = pauli_y();
  spec.omega_x = drive.omega_x;
  spec.omega_y = drive.omega_y;
  return spec;
}

const CMatrix& product_to_bell() {
  static const CMatrix w = [] {
    // product order {|11>,|10>,|01>,|00>}; bell order {|11>,|Psi+>,|00>,|Psi->}
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(2, 1) = kInvSqrt2;  // |Psi+> = (|01> + |10>)/sqrt2
    m(1, 1) = kInvSqrt2;
    m(3, 2) = 1.0;
    m(2, 3) = kInvSqrt2;  // |Psi-> = (|01> - |10>)/sqrt2
    m(1, 3) = -kInvSqrt2;
    return m;
  }();
  return w;
}

HamiltonianSpec h_two(Basis basis, const DriveParams& drive) {
  if (basis != Basis::product4 && basis != Basis::bell4) {
    throw ConfigError("h_two: basis must be product4 or bell4, got '" +
                      std::string(to_string(basis)) + "'");
  }
  HamiltonianSpec spec;
  spec.basis = basis;
  product4_parts(drive, spec.drift, spec.control_x, spec.control_y);
  if (basis == Basis::bell4) {
    const CMatrix& w = product_to_bell();
    spec.drift = w.adjoint() * spec.drift * w;
    spec.control_x = w.adjoint() * spec.control_x * w;
    spec.control_y = w.adjoint() * spec.control_y * w;
  }
  spec.omega_x = drive.omega_x;
  spec.omega_y = drive.omega_y;
  return spec;
}

const CMatrix& spin1_x() {
  static const CMatrix m = [] {
    CMatrix x = CMatrix::Zero(3, 3);
    x(0, 1) = x(1, 0) = x(1, 2) = x(2, 1) = kInvSqrt2;
    return x;
  }();
  return m;
}

const CMatrix& spin1_y() {
  static const CMatrix m = [] {
    CMatrix y = CMatrix::Zero(3, 3);
    y(0, 1) = y(1, 2) = -kI * kInvSqrt2;
    y(1, 0) = y(2, 1) = kI * kInvSqrt2;
    return y;
  }();
  return m;
}

HamiltonianSpec h_sym3(const DriveParams& drive) {
  HamiltonianSpec spec;
  spec.basis = Basis::sym3;
  spec.drift = CMatrix::Zero(3, 3);
  spec.drift(0, 0) = units::kHbar * drive.delta;
  spec.drift(1, 1) = drive.v;
  spec.drift(2, 2) = -units::kHbar * drive.delta;
  // hbar Omega_x I_x = (hbar Omega_x / 2) (2 I_x)
  spec.control_x = 2.0 * spin1_x();
  spec.control_y = 2.0 * spin1_y();
  spec.omega_x = drive.omega_x;
  spec.omega_y = drive.omega_y;
  return spec;
}

CMatrix embed_sym3(const CMatrix& h3, Complex psi_minus_energy) {
  CMatrix out = CMatrix::Zero(4, 4);
  out.topLeftCorner(3, 3) = h3;
  out(3, 3) = psi_minus_energy;
  return out;
}

double dressed_edm(double delta, double omega, double d10) {
  if (omega < 0.0) throw DomainError("dressed_edm: Rabi frequency must be >= 0");
  const double norm = std::hypot(delta, omega);
  if (norm == 0.0) throw DomainError("dressed_edm: undefined for delta = omega = 0");
  return d10 * omega / norm;
}

}  // namespace polargate
