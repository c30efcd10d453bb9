#include "polargate/optimizer.hpp"

#include <cmath>
#include <limits>

#include "polargate/errors.hpp"

namespace polargate {

namespace {

constexpr double kBoundaryTol = 1e-10;

bool on_boundary(double x, double y, double radius) {
  return std::hypot(x, y) >= radius * (1.0 - kBoundaryTol);
}

// Drops the outward radial part of v on boundary pairs.
void remove_outward(const RVector& x, RVector& v, double radius) {
  for (Eigen::Index j = 0; j + 1 < x.size(); j += 2) {
    if (!on_boundary(x(j), x(j + 1), radius)) continue;
    const double r = std::hypot(x(j), x(j + 1));
    const double ux = x(j) / r;
    const double uy = x(j + 1) / r;
    const double radial = v(j) * ux + v(j + 1) * uy;
    if (radial > 0.0) {
      v(j) -= radial * ux;
      v(j + 1) -= radial * uy;
    }
  }
}

}  // namespace

bool project_onto_disks(RVector& x, double radius) {
  bool moved = false;
  for (Eigen::Index j = 0; j + 1 < x.size(); j += 2) {
    double r = std::hypot(x(j), x(j + 1));
    if (r <= radius) continue;
    moved = true;
    double scale = radius / r;
    x(j) *= scale;
    x(j + 1) *= scale;
    // Round-off can leave the pair one ulp outside.
    while (std::hypot(x(j), x(j + 1)) > radius) {
      x(j) *= 1.0 - std::numeric_limits<double>::epsilon();
      x(j + 1) *= 1.0 - std::numeric_limits<double>::epsilon();
    }
  }
  return moved;
}

RVector projected_gradient(const RVector& x, const RVector& grad, double radius) {
  RVector g = grad;
  remove_outward(x, g, radius);
  return g;
}

QuasiNewtonResult maximize_disk_bfgs(const ValueAndGradient& objective, RVector x0,
                                     const QuasiNewtonOptions& options) {
  if (x0.size() % 2 != 0) throw ConfigError("maximize_disk_bfgs: odd variable count");
  const auto n = x0.size();
  QuasiNewtonResult result;
  project_onto_disks(x0, options.radius);

  RVector x = std::move(x0);
  RVector g(n);
  double f = objective(x, g);
  ++result.evaluations;
  RMatrix hinv = RMatrix::Identity(n, n);
  bool scaled = false;

  auto record = [&] {
    result.value_history.push_back(f);
    result.grad_norm_history.push_back(
        n == 0 ? 0.0 : projected_gradient(x, g, options.radius).cwiseAbs().maxCoeff());
  };
  record();

  RVector x_new(n);
  RVector g_new(n);
  for (int it = 0; it < options.max_iters; ++it) {
    if (result.grad_norm_history.back() <= options.grad_tol) {
      result.converged = true;
      result.stop_reason = "projected gradient below tolerance";
      break;
    }
    bool reset_tried = false;
    bool accepted = false;
    bool clipped = false;
    double f_new = f;
    while (!accepted) {
      RVector d = hinv * g;
      if (d.dot(g) <= 0.0) {
        hinv.setIdentity();
        scaled = false;
        d = g;
      }
      remove_outward(x, d, options.radius);
      double alpha = 1.0;
      if (!scaled) {
        // No curvature information yet: cap the first trial displacement.
        const double dmax = d.cwiseAbs().maxCoeff();
        if (dmax > 0.0) alpha = std::min(1.0, options.initial_step / dmax);
      }
      for (int bt = 0; bt < options.max_backtracks; ++bt) {
        x_new = x + alpha * d;
        clipped = project_onto_disks(x_new, options.radius);
        f_new = objective(x_new, g_new);
        ++result.evaluations;
        if (std::isfinite(f_new) && f_new >= f + options.armijo * g.dot(x_new - x) &&
            f_new >= f) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (accepted) break;
      if (reset_tried || scaled == false) break;
      // Stale curvature model: retry once from steepest ascent.
      hinv.setIdentity();
      scaled = false;
      reset_tried = true;
    }
    if (!accepted) {
      result.stop_reason = "line search made no progress";
      break;
    }
    RVector s = x_new - x;
    RVector y = g - g_new;  // gradient change of -f
    if (clipped) {
      // Pairs pinned on the boundary do not contribute curvature.
      for (Eigen::Index j = 0; j + 1 < n; j += 2) {
        if (on_boundary(x_new(j), x_new(j + 1), options.radius)) {
          s(j) = s(j + 1) = y(j) = y(j + 1) = 0.0;
        }
      }
    }
    x = x_new;
    g = g_new;
    f = f_new;
    ++result.iterations;
    record();

    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm() && sy > 0.0) {
      if (!scaled) {
        hinv = RMatrix::Identity(n, n) * (sy / y.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RVector hy = hinv * y;
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      hinv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
      hinv.noalias() += (rho * rho * y.dot(hy) + rho) * (s * s.transpose());
    }
  }
  if (!result.converged && result.stop_reason.empty()) {
    result.stop_reason = "iteration limit reached";
  }
  // Convergence can coincide with the last allowed iteration.
  if (!result.converged && result.grad_norm_history.back() <= options.grad_tol) {
    result.converged = true;
    result.stop_reason = "projected gradient below tolerance";
  }
  result.x = std::move(x);
  result.value = f;
  return result;
}

}  // namespace polargate
