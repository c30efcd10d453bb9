#pragma once

#include <complex>

#include <Eigen/Dense>

namespace polargate {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest entry of |H - H^dagger| divided by the largest |H_ij|; zero for the
/// zero matrix.
double hermiticity_defect(const CMatrix& h);

/// max |U^dagger U - I|.
double unitarity_defect(const CMatrix& u);

/// Throws NumericalError when hermiticity_defect(h) > tol.
void require_hermitian(const CMatrix& h, double tol, const char* what);

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns are orthonormal eigenvectors
};

HermitianEigen eigh(const CMatrix& h);

/// exp(-i h t) for Hermitian h given in angular-frequency units.
CMatrix expm_hermitian(const CMatrix& h, double t);

/// Exponential of one piecewise-constant step together with the data needed
/// for exact directional derivatives:
///   d/de exp(-i (h + e g) t) = V [ (V^dagger (-i t g) V) o Phi ] V^dagger.
struct StepExponential {
  CMatrix u;
  CMatrix vectors;
  CMatrix phi;

  static StepExponential compute(const CMatrix& h, double t);

  /// Directional derivative of u along generator g.
  CMatrix derivative(const CMatrix& g, double t) const;

  /// tr(m * du) along generator g without forming du: the gradient kernel.
  /// `m_eig` must be V^dagger m V.
  Complex trace_derivative(const CMatrix& m_eig, const CMatrix& g, double t) const;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace polargate
