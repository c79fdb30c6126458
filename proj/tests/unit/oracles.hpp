#pragma once

// Reference computations that do not touch the contour machinery.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "oplog/linops.hpp"

namespace oracle {

using Dense = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Principal log through an eigendecomposition V·diag(log λ)·V⁻¹.
inline Dense eigen_log(const Dense& a) {
  Eigen::ComplexEigenSolver<Dense> es(a);
  const Dense& v = es.eigenvectors();
  Eigen::VectorXcd logs = es.eigenvalues().unaryExpr([](Complex z) { return std::log(z); });
  return v * logs.asDiagonal() * v.inverse();
}

inline Dense eigen_exp(const Dense& a) {
  Eigen::ComplexEigenSolver<Dense> es(a);
  const Dense& v = es.eigenvectors();
  Eigen::VectorXcd e = es.eigenvalues().unaryExpr([](Complex z) { return std::exp(z); });
  return v * e.asDiagonal() * v.inverse();
}

inline double rel(const Dense& value, const Dense& ref) {
  const double scale = ref.norm();
  return scale > 0 ? (value - ref).norm() / scale : (value - ref).norm();
}

inline double rel(const oplog::OperatorMatrix& value, const Dense& ref) { return rel(value.dense(), ref); }

/// P·diag(λ)·P⁻¹ with λ uniform in the disc |λ − center| ≤ radius and P = I + 0.3·G/√n.
inline Dense random_diagonalizable(std::mt19937_64& rng, int n, Complex center, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd lambda(n);
  for (int i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(unit(rng));
    const double th = 2.0 * M_PI * unit(rng);
    lambda(i) = center + std::polar(r, th);
  }
  Dense p = Dense::Identity(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) p(i, j) += 0.3 * Complex(normal(rng), normal(rng)) / std::sqrt(2.0 * n);
  return p * lambda.asDiagonal() * p.inverse();
}

inline Dense random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Dense m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = scale * Complex(normal(rng), normal(rng)) / std::sqrt(2.0 * n);
  return m;
}

}  // namespace oracle
