#pragma once

#include <random>

#include "polargate/linalg.hpp"

namespace testing_util {

using polargate::CMatrix;
using polargate::Complex;

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline CMatrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return 0.5 * (a + a.adjoint());
}

}  // namespace testing_util
