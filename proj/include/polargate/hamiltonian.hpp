#pragma once

#include <string_view>

#include "polargate/linalg.hpp"

namespace polargate {

enum class Basis { single, sym3, product4, bell4, motional12 };

std::string_view to_string(Basis basis);
/// Throws ConfigError for unknown labels.
Basis parse_basis(std::string_view label);
int basis_dimension(Basis basis);

struct DipoleGeometry {
  double r_e = 0.0;    // m
  double theta = 0.0;  // angle between separation and the quantization axis

  void validate() const;
};

/// Rotating-frame drive. delta, omega_x, omega_y in rad/s; v is the signed
/// DDI energy in joules (eta * vddi_point).
struct DriveParams {
  double delta = 0.0;
  double omega_x = 0.0;
  double omega_y = 0.0;
  double v = 0.0;

  double rabi() const;
};

/// H = drift + (hbar Omega_x / 2) control_x + (hbar Omega_y / 2) control_y.
/// drift in joules, controls dimensionless. Identity offsets (E-bar) omitted.
struct HamiltonianSpec {
  Basis basis = Basis::single;
  CMatrix drift;
  CMatrix control_x;
  CMatrix control_y;
  double omega_x = 0.0;  // drive the spec was built with
  double omega_y = 0.0;

  int dim() const { return static_cast<int>(drift.rows()); }
  /// Full Hamiltonian (J) at the stored drive.
  CMatrix matrix() const { return matrix_at(omega_x, omega_y); }
  /// Full Hamiltonian (J) with the drive quadratures replaced.
  CMatrix matrix_at(double ox, double oy) const;
  /// Throws NumericalError unless drift and controls are Hermitian to 1e-12
  /// and dimensions agree.
  void validate() const;
};

/// d10^2 / (4 pi eps0 r^3) in joules. Throws DomainError for r <= 0.
double vddi_point(double d10, double r);

/// 1 - 3 cos^2(theta).
double geometry_factor(double theta);

HamiltonianSpec h_single(const DriveParams& drive);

/// basis must be product4 ({|11>,|10>,|01>,|00>}) or bell4
/// ({|11>,|Psi+>,|00>,|Psi->}).
HamiltonianSpec h_two(Basis basis, const DriveParams& drive);

/// Symmetric subspace {|11>,|Psi+>,|00>}.
HamiltonianSpec h_sym3(const DriveParams& drive);

/// Columns of W are the bell4 states written in the product4 basis, so that
/// H_bell = W^dagger H_product W.
const CMatrix& product_to_bell();

/// Spin-1 matrices in the order {|11>,|Psi+>,|00>}.
const CMatrix& spin1_x();
const CMatrix& spin1_y();

/// h3 (+) psi_minus_energy acting on |Psi->.
CMatrix embed_sym3(const CMatrix& h3, Complex psi_minus_energy);

/// Dipole moment of the dressed eigenstates, d10 * Omega / sqrt(Delta^2 + Omega^2).
/// Throws DomainError when Delta = Omega = 0 or Omega < 0.
double dressed_edm(double delta, double omega, double d10);

}  // namespace polargate
