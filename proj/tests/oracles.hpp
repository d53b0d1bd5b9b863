#pragma once

// Test-only reference computations. These go through dense Eigen matrices
// (explicit projectors, SVD, Hermitian eigensolver) rather than the
// closed-form index arithmetic the library uses.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

#include "e91/qmath.hpp"

namespace oracle {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline Vec to_eigen(const e91::Ket& k) {
  Vec v(static_cast<Eigen::Index>(k.dim()));
  for (std::size_t i = 0; i < k.dim(); ++i) v(static_cast<Eigen::Index>(i)) = k[i];
  return v;
}

inline Vec photon(e91::Basis b, int bit) {
  Vec v(2);
  if (b == e91::Basis::rectilinear) {
    v << (bit == 0 ? 1.0 : 0.0), (bit == 0 ? 0.0 : 1.0);
  } else {
    const double h = std::sqrt(0.5);
    v << h, (bit == 0 ? h : -h);
  }
  return v;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// <psi| (I_probe (x) |ab><ab|) |psi> with an explicit projector matrix.
inline double outcome_probability(const e91::Ket& joint, e91::Basis alice, e91::Basis bob, int a, int b) {
  const Eigen::Index d = static_cast<Eigen::Index>(joint.dim() / 4);
  const Vec pair = kron(photon(alice, a), photon(bob, b));
  const Mat proj = kron(Mat::Identity(d, d), pair * pair.adjoint());
  const Vec psi = to_eigen(joint);
  return (psi.adjoint() * proj * psi)(0, 0).real();
}

/// 1/2 + 1/4 || |eta><eta| - |chi><chi| ||_1 from the eigenvalues of the difference.
inline double helstrom(const e91::Ket& eta, const e91::Ket& chi) {
  const Vec e = to_eigen(eta), c = to_eigen(chi);
  const Mat diff = e * e.adjoint() - c * c.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> solver(diff);
  return 0.5 + 0.25 * solver.eigenvalues().cwiseAbs().sum();
}

/// Singular values of the 2x2 amplitude matrix, largest first.
inline std::pair<double, double> schmidt(const e91::Ket& k) {
  Eigen::Matrix2cd m;
  m << k[0], k[1], k[2], k[3];
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  return {svd.singularValues()(0), svd.singularValues()(1)};
}

/// 1 - H2(p) using natural logarithms.
inline double mutual_information(double p) {
  auto h = [](double q) { return q > 0.0 ? -q * std::log(q) : 0.0; };
  return 1.0 - (h(p) + h(1.0 - p)) / std::log(2.0);
}

inline e91::Ket random_ket(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  e91::Ket v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = {g(rng), g(rng)};
  return v;
}

/// Binomial sigma for a proportion p over n trials.
inline double binomial_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace oracle
