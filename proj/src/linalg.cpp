#include "polargate/linalg.hpp"

#include <cmath>
#include <string>

#include "polargate/errors.hpp"

namespace polargate {

double hermiticity_defect(const CMatrix& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (h.size() == 0 || scale == 0.0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double unitarity_defect(const CMatrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

void require_hermitian(const CMatrix& h, double tol, const char* what) {
  if (h.rows() != h.cols()) {
    throw NumericalError(std::string(what) + ": matrix is not square");
  }
  const double defect = hermiticity_defect(h);
  if (defect > tol) {
    throw NumericalError(std::string(what) + ": matrix is not Hermitian (defect " +
                         std::to_string(defect) + ")");
  }
}

HermitianEigen eigh(const CMatrix& h) {
  // Symmetrize so round-off in the lower triangle cannot leak in.
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix expm_hermitian(const CMatrix& h, double t) {
  const auto eig = eigh(h);
  CVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    phases(k) = std::exp(-kI * eig.values(k) * t);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace

StepExponential StepExponential::compute(const CMatrix& h, double t) {
  const auto eig = eigh(h);
  const auto n = eig.values.size();
  StepExponential out;
  out.vectors = eig.vectors;
  CVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::exp(-kI * eig.values(k) * t);
  out.u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  // (e^a - e^b)/(a - b) with a = -i l_k t, written in a form that stays
  // accurate through degeneracies.
  out.phi.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const double mean = 0.5 * (eig.values(k) + eig.values(l));
      const double half_gap = 0.5 * (eig.values(k) - eig.values(l)) * t;
      out.phi(k, l) = std::exp(-kI * mean * t) * sinc(half_gap);
    }
  }
  return out;
}

CMatrix StepExponential::derivative(const CMatrix& g, double t) const {
  const CMatrix k = vectors.adjoint() * (-kI * t * g) * vectors;
  return vectors * k.cwiseProduct(phi) * vectors.adjoint();
}

Complex StepExponential::trace_derivative(const CMatrix& m_eig, const CMatrix& g,
                                          double t) const {
  const CMatrix k = vectors.adjoint() * (-kI * t * g) * vectors;
  // tr(A (K o Phi)) = sum_kl A_lk K_kl Phi_kl
  return m_eig.transpose().cwiseProduct(k).cwiseProduct(phi).sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace polargate
