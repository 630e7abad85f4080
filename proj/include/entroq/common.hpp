#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace entroq {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Centralized numeric tolerances. Double precision on joint dimensions up
// to kMaxJointDim loses roughly three digits through the eigensolvers, so
// everything downstream is calibrated against these three constants.
inline constexpr double kTolHerm = 1e-10;
inline constexpr double kTolPsd = 1e-9;
inline constexpr double kTolEq = 1e-9;
inline constexpr Index kMaxJointDim = 512;

// Deterministic RNG used across the project. Seeds are always explicit;
// there are no wall-clock defaults anywhere.
using Rng = std::mt19937_64;

inline double rand_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline Cplx rand_complex_normal(Rng& rng) {
  return Cplx(rand_normal(rng), rand_normal(rng));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tol = kTolHerm) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace entroq
