#include "polargate/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "polargate/errors.hpp"

namespace polargate {

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > 400) throw DomainError("gauss_hermite: order must be in [1, 400]");
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  // Jacobi matrix of the physicists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw NumericalError("gauss_hermite: eigensolver failed");
  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

double oscillator_polynomial(int n, double xi, double a) {
  if (n < 0) throw DomainError("oscillator_polynomial: n must be >= 0");
  // Normalized recurrence h_n = sqrt(2/n) xi h_{n-1} - sqrt((n-1)/n) h_{n-2}
  // with h_n = H_n / sqrt(2^n n!).
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 1; k <= n; ++k) {
    const double next = std::sqrt(2.0 / k) * xi * cur - std::sqrt((k - 1.0) / k) * prev;
    prev = cur;
    cur = next;
  }
  return cur / std::pow(std::numbers::pi * a * a, 0.25);
}

}  // namespace polargate
