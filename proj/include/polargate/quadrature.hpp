#pragma once

#include <vector>

namespace polargate {

/// Gauss-Hermite rule for weight exp(-x^2): sum_i w_i f(x_i) ~ int f(x) e^{-x^2} dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch construction; results are cached per order.
const GaussHermiteRule& gauss_hermite(int order);

/// Normalized harmonic-oscillator eigenfunction with oscillator length a,
/// evaluated at x = a * xi *without* its Gaussian factor exp(-xi^2/2):
/// returns (2^n n!)^{-1/2} (pi a^2)^{-1/4} H_n(xi).
double oscillator_polynomial(int n, double xi, double a);

}  // namespace polargate
