#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polargate/linalg.hpp"

namespace polargate {

/// Returns f(x) and writes grad f(x); the optimizer maximizes f.
using ValueAndGradient = std::function<double(const RVector& x, RVector& grad)>;

struct QuasiNewtonOptions {
  int max_iters = 5000;
  double grad_tol = 1e-8;  // on the projected gradient, infinity norm
  double radius = 1.0;     // each consecutive pair (x_2j, x_2j+1) stays in this disk
  double armijo = 1e-4;
  int max_backtracks = 40;
  double initial_step = 0.05;  // largest pair displacement of the first trial step
};

struct QuasiNewtonResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> value_history;      // accepted iterates, starting point first
  std::vector<double> grad_norm_history;  // projected gradient infinity norm
};

/// Projected BFGS ascent over a product of disks. Iterates are projected
/// radially onto the feasible set; pairs left on the boundary by a step are
/// masked out of that step's curvature pair, so the inverse-Hessian model
/// only learns from free variables. Accepted iterates never decrease f.
QuasiNewtonResult maximize_disk_bfgs(const ValueAndGradient& objective, RVector x0,
                                     const QuasiNewtonOptions& options);

/// Radial projection of every pair onto the disk; returns true when any
/// pair was moved.
bool project_onto_disks(RVector& x, double radius);

/// Gradient with the outward radial component removed on pairs that sit on
/// the boundary.
RVector projected_gradient(const RVector& x, const RVector& grad, double radius);

}  // namespace polargate
