// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations used by the tests: Kronecker-product
// solves, quadrature, finite differences and dense frequency grids.

#ifndef PHMOR_TEST_ORACLES_HPP
#define PHMOR_TEST_ORACLES_HPP

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "phmor/core.hpp"

namespace oracle
{

using phmor::Complex;
using phmor::CMatrix;
using phmor::Matrix;
using phmor::Vector;

// vec(Y) = -(I (x) A + B (x) I)^{-1} vec(C) for A Y + Y B^T + C = 0.
inline Matrix kron_sylvester(const Matrix &A, const Matrix &B, const Matrix &C)
{
  const auto n = A.rows(), r = B.rows();
  Matrix K = Matrix::Zero(n * r, n * r);
  for (Eigen::Index j = 0; j < r; ++j)
  {
    K.block(j * n, j * n, n, n) += A;
    for (Eigen::Index k = 0; k < r; ++k)
    {
      K.block(j * n, k * n, n, n) += B(j, k) * Matrix::Identity(n, n);
    }
  }
  const Vector c = Eigen::Map<const Vector>(C.data(), n * r);
  const Vector y = -K.fullPivLu().solve(c);
  return Eigen::Map<const Matrix>(y.data(), n, r);
}

inline double sigma(const CMatrix &H)
{
  Eigen::JacobiSVD<CMatrix> svd(H);
  return svd.singularValues()(0);
}

// Direct resolvent of a descriptor realization.
inline CMatrix resolvent_tf(const phmor::PHDae &sys, Complex s)
{
  const CMatrix M = s * sys.E.cast<Complex>() - (sys.J - sys.R).cast<Complex>();
  const CMatrix X = M.fullPivLu().solve((sys.G - sys.P).cast<Complex>());
  return (sys.G + sys.P).transpose().cast<Complex>() * X + (sys.S - sys.N).cast<Complex>();
}

inline CMatrix ss_tf(const Matrix &A, const Matrix &B, const Matrix &C, const Matrix &D, Complex s)
{
  const auto n = A.rows();
  const CMatrix M = s * CMatrix::Identity(n, n) - A.cast<Complex>();
  return C.cast<Complex>() * M.fullPivLu().solve(B.cast<Complex>()) + D.cast<Complex>();
}

// max over a dense log grid, refined by golden-section search around the best
// grid point.
inline double dense_grid_max(const std::function<double(double)> &f, double lo, double hi,
                             int points)
{
  double best = -1, best_w = lo;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < points; ++k)
  {
    const double w = std::pow(10.0, a + (b - a) * k / (points - 1));
    const double v = f(w);
    if (v > best)
    {
      best = v;
      best_w = w;
    }
  }
  const double step = std::pow(10.0, (b - a) / (points - 1));
  double x0 = best_w / step, x3 = best_w * step;
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  for (int it = 0; it < 200; ++it)
  {
    const double x1 = x3 - g * (x3 - x0), x2 = x0 + g * (x3 - x0);
    if (f(x1) < f(x2))
    {
      x0 = x1;
    }
    else
    {
      x3 = x2;
    }
  }
  return std::max({best, f(0.5 * (x0 + x3)), f(0.0)});
}

// Central differences of f at x along every coordinate.
inline Vector fd_gradient(const std::function<double(const Vector &)> &f, const Vector &x,
                          double h = 1e-6)
{
  Vector g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k)
  {
    Vector xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    g(k) = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

// Stable random (A, B, C): A = Q (D + K) Q^T with D negative diagonal, K skew.
inline void random_stable(Eigen::Index n, Eigen::Index m, std::mt19937_64 &rng, Matrix &A,
                          Matrix &B, Matrix &C)
{
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.1, 2.0);
  auto randn = [&](Eigen::Index r, Eigen::Index c)
  {
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < M.size(); ++i)
    {
      M.data()[i] = nd(rng);
    }
    return M;
  };
  Matrix K = randn(n, n);
  K = (K - K.transpose()).eval();
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    d(i) = -ud(rng);
  }
  const Matrix Q = Eigen::HouseholderQR<Matrix>(randn(n, n)).householderQ();
  A = Q * (Matrix(d.asDiagonal()) + K) * Q.transpose();
  B = randn(n, m);
  C = randn(m, n);
}

}  // namespace oracle

#endif  // PHMOR_TEST_ORACLES_HPP
