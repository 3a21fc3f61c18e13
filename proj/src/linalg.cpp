// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace phmor
{

namespace
{

constexpr double COLLISION_TOL = 1.0e-13;
constexpr double ILL_CONDITIONED_RESIDUAL = 1.0e-8;

}  // namespace

SylvesterSolver::SylvesterSolver(const Matrix &A) : A_(A)
{
  if (A.rows() != A.cols())
  {
    throw StructureError("SylvesterSolver: coefficient must be square");
  }
  if (A.rows() > 0)
  {
    Eigen::ComplexSchur<CMatrix> schur(A.cast<Complex>());
    U_ = schur.matrixU();
    T_ = schur.matrixT();
    eigs_ = T_.diagonal();
  }
}

Matrix SylvesterSolver::solve(const Matrix &B, const Matrix &C, SolveDiagnostics *diag) const
{
  const auto n = size();
  const auto r = B.rows();
  if (B.cols() != r || C.rows() != n || C.cols() != r)
  {
    throw StructureError("sylvester_solve: inconsistent dimensions");
  }
  if (n == 0 || r == 0)
  {
    return Matrix::Zero(n, r);
  }

  Eigen::ComplexSchur<CMatrix> schurB(B.cast<Complex>());
  const CMatrix &V = schurB.matrixU();
  const CMatrix &S = schurB.matrixT();

  const double scale = std::max(T_.cwiseAbs().maxCoeff(), S.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = 0; j < r; ++j)
    {
      if (std::abs(T_(i, i) + S(j, j)) <= COLLISION_TOL * std::max(scale, 1e-300))
      {
        std::ostringstream msg;
        msg << "sylvester_solve: eigenvalue " << T_(i, i) << " of A collides with "
            << -S(j, j) << " of -B";
        throw SingularError(msg.str());
      }
    }
  }

  // T Yt + Yt S^T + Ct = 0 with Yt = U^H Y conj(V), Ct = U^H C conj(V).
  // Column j of Yt S^T only involves columns k >= j, so sweep backwards.
  const CMatrix Ct = U_.adjoint() * C.cast<Complex>() * V.conjugate();
  CMatrix Yt(n, r);
  for (Eigen::Index j = r - 1; j >= 0; --j)
  {
    CVector rhs = -Ct.col(j);
    for (Eigen::Index k = j + 1; k < r; ++k)
    {
      rhs -= S(j, k) * Yt.col(k);
    }
    CMatrix shifted = T_;
    shifted.diagonal().array() += S(j, j);
    Yt.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  Matrix Y = (U_ * Yt * V.transpose()).real();

  if (diag != nullptr)
  {
    const double cnorm = C.norm();
    const double res = (A_ * Y + Y * B.transpose() + C).norm();
    diag->relative_residual = cnorm > 0 ? res / cnorm : res;
    diag->ill_conditioned = diag->relative_residual > ILL_CONDITIONED_RESIDUAL;
  }
  return Y;
}

Matrix sylvester_solve(const Matrix &A, const Matrix &B, const Matrix &C, SolveDiagnostics *diag)
{
  return SylvesterSolver(A).solve(B, C, diag);
}

double spectral_abscissa(const Matrix &A)
{
  if (A.rows() == 0)
  {
    return -std::numeric_limits<double>::infinity();
  }
  Eigen::EigenSolver<Matrix> eig(A, false);
  return eig.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix &A, double margin)
{
  return spectral_abscissa(A) < -margin;
}

Matrix lyapunov_solve(const Matrix &A, const Matrix &Q, SolveDiagnostics *diag)
{
  if (A.rows() != A.cols() || Q.rows() != A.rows() || Q.cols() != A.cols())
  {
    throw StructureError("lyapunov_solve: inconsistent dimensions");
  }
  if (A.rows() == 0)
  {
    return Matrix(0, 0);
  }
  SylvesterSolver solver(A);
  const double abscissa = solver.eigenvalues().real().maxCoeff();
  if (!(abscissa < 0))
  {
    std::ostringstream msg;
    msg << "lyapunov_solve: coefficient is not Hurwitz (spectral abscissa " << abscissa << ")";
    throw NotHurwitzError(msg.str());
  }
  Matrix X = solver.solve(A, Q, diag);
  return sym_part(X);
}

}  // namespace phmor
