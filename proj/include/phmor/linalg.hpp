// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_LINALG_HPP
#define PHMOR_LINALG_HPP

#include "phmor/core.hpp"

namespace phmor
{

struct SolveDiagnostics
{
  double relative_residual = 0;
  bool ill_conditioned = false;
};

///
/// Bartels-Stewart solver for A Y + Y B^T + C = 0 with the Schur form of A
/// computed once. The complex Schur form is used for both coefficients, so
/// every step is a triangular solve.
///
class SylvesterSolver
{
public:
  explicit SylvesterSolver(const Matrix &A);

  Eigen::Index size() const { return T_.rows(); }
  const CVector &eigenvalues() const { return eigs_; }

  // Throws SingularError when an eigenvalue of A collides with one of -B.
  Matrix solve(const Matrix &B, const Matrix &C, SolveDiagnostics *diag = nullptr) const;

private:
  Matrix A_;
  CMatrix U_, T_;
  CVector eigs_;
};

// A Y + Y B^T + C = 0.
Matrix sylvester_solve(const Matrix &A, const Matrix &B, const Matrix &C,
                       SolveDiagnostics *diag = nullptr);

// A X + X A^T + Q = 0 for Hurwitz A; the result is symmetrized.
Matrix lyapunov_solve(const Matrix &A, const Matrix &Q, SolveDiagnostics *diag = nullptr);

// Largest real part of the spectrum (-inf for empty A).
double spectral_abscissa(const Matrix &A);

bool is_hurwitz(const Matrix &A, double margin = 0.0);

}  // namespace phmor

#endif  // PHMOR_LINALG_HPP
