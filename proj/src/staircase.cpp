// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace phmor
{

namespace
{

constexpr double INF = std::numeric_limits<double>::infinity();

// Number of normalized values above the threshold. Values are divided by the
// larger of their maximum and `scale`, so that a block which is zero up to
// rounding is not promoted to full rank. Values within a factor 10 of the
// threshold cannot be classified reliably.
Eigen::Index numerical_rank(const Vector &values, double tol, const char *what, double scale = 0)
{
  if (values.size() == 0)
  {
    return 0;
  }
  const double vmax = std::max(values.cwiseAbs().maxCoeff(), scale);
  if (vmax == 0)
  {
    return 0;
  }
  Eigen::Index rank = 0;
  bool ambiguous = false;
  std::vector<double> normalized;
  for (Eigen::Index i = 0; i < values.size(); ++i)
  {
    const double v = values(i) / vmax;
    normalized.push_back(v);
    if (v > tol)
    {
      ++rank;
    }
    if (v > 0.1 * tol && v < 10 * tol)
    {
      ambiguous = true;
    }
  }
  if (ambiguous)
  {
    std::ostringstream msg;
    msg << "to_staircase: ambiguous rank decision for " << what << " (threshold " << tol << ")";
    throw RankAmbiguityError(msg.str(), std::move(normalized));
  }
  return rank;
}

double min_singular_value(const Matrix &M)
{
  if (M.size() == 0)
  {
    return INF;
  }
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues().minCoeff();
}

PHDae transform(const PHDae &sys, const Matrix &T)
{
  PHDae out;
  out.E = T * sys.E * T.transpose();
  out.J = T * sys.J * T.transpose();
  out.R = T * sys.R * T.transpose();
  out.G = T * sys.G;
  out.P = T * sys.P;
  out.S = sys.S;
  out.N = sys.N;
  return out;
}

// Sum of squares of the entries that the staircase form requires to vanish.
double zero_pattern_sq(const PHDae &s, const StaircaseDims &d)
{
  const auto k = d.n1 + d.n2;
  const auto n = d.total();
  const auto o4 = d.offset(4);
  double acc = 0;
  acc += s.E.bottomRows(n - k).squaredNorm() + s.E.topRightCorner(k, n - k).squaredNorm();
  acc += s.R.middleRows(o4, d.n4).squaredNorm() + s.R.middleCols(o4, d.n4).squaredNorm();
  acc += s.J.block(o4, d.n1, d.n4, n - d.n1).squaredNorm();
  acc += s.J.block(d.n1, o4, n - d.n1, d.n4).squaredNorm();
  acc += s.P.middleRows(o4, d.n4).squaredNorm();
  return acc;
}

void clear_zero_pattern(PHDae &s, const StaircaseDims &d)
{
  const auto k = d.n1 + d.n2;
  const auto n = d.total();
  const auto o4 = d.offset(4);
  s.E.bottomRows(n - k).setZero();
  s.E.rightCols(n - k).setZero();
  s.R.middleRows(o4, d.n4).setZero();
  s.R.middleCols(o4, d.n4).setZero();
  s.J.block(o4, d.n1, d.n4, n - d.n1).setZero();
  s.J.block(d.n1, o4, n - d.n1, d.n4).setZero();
  s.P.middleRows(o4, d.n4).setZero();
}

void check_regular(const PHDae &sys)
{
  if (pencil_rcond(sys, 0x5eed) < IRREGULAR_RCOND)
  {
    throw SingularError("to_staircase: the pencil sE - (J - R) is not regular");
  }
}

}  // namespace

Eigen::Index StaircaseDims::offset(int k) const
{
  switch (k)
  {
    case 1: return 0;
    case 2: return n1;
    case 3: return n1 + n2;
    case 4: return n1 + n2 + n3;
    default: throw StructureError("StaircaseDims: block index must be 1..4");
  }
}

Eigen::Index StaircaseDims::size(int k) const
{
  switch (k)
  {
    case 1: return n1;
    case 2: return n2;
    case 3: return n3;
    case 4: return n4;
    default: throw StructureError("StaircaseDims: block index must be 1..4");
  }
}

Matrix StaircaseSystem::block(const Matrix &M, int i, int j) const
{
  return M.block(dims.offset(i), dims.offset(j), dims.size(i), dims.size(j));
}

Matrix StaircaseSystem::rows(const Matrix &M, int k) const
{
  return M.middleRows(dims.offset(k), dims.size(k));
}

int index_of(const StaircaseDims &dims)
{
  if (dims.n1 > 0)
  {
    return 2;
  }
  return dims.n3 > 0 ? 1 : 0;
}

int index_of(const StaircaseSystem &st) { return index_of(st.dims); }

StaircaseCheck check_staircase(const StaircaseSystem &st, const PHDae &source,
                               const Tolerances &tol)
{
  const auto &d = st.dims;
  const auto &s = st.sys;
  StaircaseCheck c;
  const auto n = source.n();
  c.orthogonality = (st.T.transpose() * st.T - Matrix::Identity(n, n)).norm();
  const auto k = d.n1 + d.n2;
  c.e_block_min_eig = k > 0 ? min_sym_eigenvalue(s.E.topLeftCorner(k, k)) : INF;
  c.j41_min_sv = min_singular_value(st.J_block(4, 1));
  c.a33_min_sv = min_singular_value(st.J_block(3, 3) - st.R_block(3, 3));
  c.zero_pattern = std::sqrt(zero_pattern_sq(s, d));

  const PHDae back = transform(s, st.T.transpose());
  const double num = std::sqrt((back.E - source.E).squaredNorm() + (back.J - source.J).squaredNorm()
                               + (back.R - source.R).squaredNorm() + (back.G - source.G).squaredNorm()
                               + (back.P - source.P).squaredNorm());
  const double den = std::sqrt(source.E.squaredNorm() + source.J.squaredNorm()
                               + source.R.squaredNorm() + source.G.squaredNorm()
                               + source.P.squaredNorm());
  c.reassembly = num / std::max(den, 1e-300);

  const double scale_E = std::max(s.E.norm(), 1e-300);
  const double scale_A = std::max((s.J - s.R).norm(), 1e-300);
  const double loose = std::max(tol.tol_sym, 1e-12) * 1e3;
  c.pass = d.n1 == d.n4 && c.orthogonality <= loose * std::max<double>(1, n)
           && c.e_block_min_eig > tol.tol_rank * scale_E
           && c.j41_min_sv > tol.tol_rank * scale_A && c.a33_min_sv > tol.tol_rank * scale_A
           && c.zero_pattern <= loose * (scale_E + scale_A) && c.reassembly <= loose;
  return c;
}

StaircaseSystem from_blocks(const PHDae &sys, const StaircaseDims &dims, const Tolerances &tol)
{
  sys.check_dimensions();
  if (dims.total() != sys.n() || dims.n1 != dims.n4 || dims.n1 < 0 || dims.n2 < 0 || dims.n3 < 0)
  {
    throw StructureError("from_blocks: dims do not describe a staircase partition of the state");
  }
  StaircaseSystem st{dims, Matrix::Identity(sys.n(), sys.n()), sys};
  const auto check = check_staircase(st, sys, tol);
  if (!check.pass)
  {
    std::ostringstream msg;
    msg << "from_blocks: staircase invariants violated (zero pattern " << check.zero_pattern
        << ", lambda_min(E) " << check.e_block_min_eig << ", sigma_min(J41) " << check.j41_min_sv
        << ", sigma_min(J33-R33) " << check.a33_min_sv << ")";
    throw NumericalError(msg.str());
  }
  clear_zero_pattern(st.sys, dims);
  return st;
}

StaircaseSystem to_staircase(const PHDae &sys, const Tolerances &tol)
{
  sys.check_dimensions();
  tol.check();
  const auto n = sys.n();
  check_regular(sys);

  // (1) Split the state into range(E) and ker(E).
  Eigen::SelfAdjointEigenSolver<Matrix> eigE(sym_part(sys.E));
  const Vector lam = eigE.eigenvalues().reverse();  // descending
  const Matrix vecs = eigE.eigenvectors().rowwise().reverse();
  const Eigen::Index k = numerical_rank(lam.cwiseMax(0.0), tol.tol_rank, "E");
  if (k == n)
  {
    StaircaseSystem st{{0, n, 0, 0}, Matrix::Identity(n, n), sys};
    return st;
  }
  const Matrix Vp = vecs.leftCols(k);
  const Matrix Z = vecs.rightCols(n - k);

  // (2) On ker(E) the restricted pencil Z^T (J - R) Z is [[J33 - R33, 0], [0, 0]];
  // its kernel is the x4 space.
  const Matrix K = Z.transpose() * (sys.J - sys.R) * Z;
  const double scale_A = Eigen::BDCSVD<Matrix>(sys.J - sys.R).singularValues()(0);
  Eigen::BDCSVD<Matrix> svdK(K, Eigen::ComputeFullV);
  const Eigen::Index rankK =
      numerical_rank(svdK.singularValues(), tol.tol_rank, "Z^T (J - R) Z", scale_A);
  const Eigen::Index n4 = (n - k) - rankK;
  const Matrix Z3 = Z * svdK.matrixV().leftCols(rankK);
  const Matrix Z4 = Z * svdK.matrixV().rightCols(n4);

  // (3) J maps x4 into range(E); that image is the x1 space, its complement x2.
  Matrix Q1(k, 0), Q2 = Matrix::Identity(k, k);
  if (n4 > 0)
  {
    if (n4 > k)
    {
      throw SingularError("to_staircase: J41 cannot be invertible (kernel larger than range of E)");
    }
    const Matrix M = Vp.transpose() * sys.J * Z4;
    Eigen::BDCSVD<Matrix> svdM(M, Eigen::ComputeFullU);
    const Eigen::Index rankM = numerical_rank(svdM.singularValues(), tol.tol_rank, "J41", scale_A);
    if (rankM != n4)
    {
      throw SingularError("to_staircase: J41 is singular; the pencil is not regular of index <= 2");
    }
    Q1 = svdM.matrixU().leftCols(n4);
    Q2 = svdM.matrixU().rightCols(k - n4);
  }

  StaircaseDims dims{n4, k - n4, rankK, n4};
  Matrix basis(n, n);
  basis << Vp * Q1, Vp * Q2, Z3, Z4;

  StaircaseSystem st{dims, basis.transpose(), transform(sys, basis.transpose())};
  const auto check = check_staircase(st, sys, tol);
  if (!check.pass)
  {
    std::ostringstream msg;
    msg << "to_staircase: transformed system violates the staircase invariants (zero pattern "
        << check.zero_pattern << ", reassembly " << check.reassembly << ", sigma_min(J41) "
        << check.j41_min_sv << ", sigma_min(J33-R33) " << check.a33_min_sv << ")";
    throw NumericalError(msg.str());
  }
  clear_zero_pattern(st.sys, dims);
  return st;
}

ProperSplit split_proper(const StaircaseSystem &st)
{
  const auto &d = st.dims;
  const auto m = st.sys.m();
  if (d.n1 == 0 && d.n3 == 0)
  {
    const auto &s = st.sys;
    return {{s.E, s.J, s.R, s.G, s.P, s.S, s.N}, Matrix::Zero(m, m)};
  }

  PHDae s = st.sys;
  const auto o2 = d.offset(2), o4 = d.offset(4);
  const auto n23 = d.n2 + d.n3;
  Matrix K1 = Matrix::Zero(d.n1, m);
  Matrix P1 = Matrix::Zero(m, m);

  if (d.n1 > 0)
  {
    // Congruence x2 <- x2 - E22^{-1} E21 x1 decouples E into diag(Sigma, E22).
    if (d.n2 > 0)
    {
      const Matrix F = st.E_block(2, 2).llt().solve(st.E_block(2, 1));
      auto right = [&](Matrix &M)
      { M.leftCols(d.n1) -= M.middleCols(o2, d.n2) * F; };
      auto left = [&](Matrix &M)
      { M.topRows(d.n1) -= F.transpose() * M.middleRows(o2, d.n2); };
      for (Matrix *M : {&s.E, &s.J, &s.R})
      {
        right(*M);
        left(*M);
      }
      left(s.G);
      left(s.P);
    }
    // Row 4 forces x1 = K1 u, row 1 then fixes x4; G4^T J14^{-1} = K1^T.
    const Matrix J41 = s.J.block(o4, 0, d.n4, d.n1);
    K1 = -J41.fullPivLu().solve(s.G.middleRows(o4, d.n4));
    const Matrix Sigma = sym_part(s.E.topLeftCorner(d.n1, d.n1));
    P1 = sym_part(K1.transpose() * Sigma * K1);
  }

  // Substituting x1 = K1 u is a congruence on the extended (x, u) space, so
  // the (x2, x3) system stays port-Hamiltonian.
  const Matrix G1 = s.G.topRows(d.n1), Pp1 = s.P.topRows(d.n1);
  const Matrix J11 = s.J.topLeftCorner(d.n1, d.n1), R11 = s.R.topLeftCorner(d.n1, d.n1);
  Matrix E23 = s.E.block(o2, o2, n23, n23);
  Matrix J23 = s.J.block(o2, o2, n23, n23);
  Matrix R23 = s.R.block(o2, o2, n23, n23);
  Matrix G23 = s.G.middleRows(o2, n23) + s.J.block(o2, 0, n23, d.n1) * K1;
  Matrix P23 = s.P.middleRows(o2, n23) + s.R.block(o2, 0, n23, d.n1) * K1;
  Matrix S = s.S + K1.transpose() * Pp1 + Pp1.transpose() * K1 + K1.transpose() * R11 * K1;
  Matrix N = s.N + K1.transpose() * G1 - G1.transpose() * K1 + K1.transpose() * J11 * K1;
  S = sym_part(S);
  N = skew_part(N);

  if (d.n3 == 0)
  {
    return {{E23, J23, R23, G23, P23, S, N}, P1};
  }

  // Eliminate x3 with the Schur complement of the extended matrix
  // [[J - R, G - P], [-(G + P)^T, -(S - N)]]; its symmetric part stays <= 0.
  const auto n2 = d.n2, n3 = d.n3;
  const Matrix A = J23 - R23;
  const Matrix B = G23 - P23;
  const Matrix C = (G23 + P23).transpose();
  const Matrix D = S - N;
  Matrix Mkk(n2 + m, n2 + m), Mke(n2 + m, n3), Mek(n3, n2 + m);
  Mkk << A.topLeftCorner(n2, n2), B.topRows(n2), -C.leftCols(n2), -D;
  Mke << A.topRightCorner(n2, n3), -C.rightCols(n3);
  Mek << A.bottomLeftCorner(n3, n2), B.bottomRows(n3);
  const Matrix A33 = A.bottomRightCorner(n3, n3);
  const Matrix Mr = Mkk - Mke * A33.partialPivLu().solve(Mek);

  const Matrix skew = skew_part(Mr);
  const Matrix symm = sym_part(Mr);
  ProperRealization pr;
  pr.E2 = E23.topLeftCorner(n2, n2);
  pr.J2 = skew.topLeftCorner(n2, n2);
  pr.R2 = -symm.topLeftCorner(n2, n2);
  pr.G2 = skew.topRightCorner(n2, m);
  pr.P2 = -symm.topRightCorner(n2, m);
  pr.S2 = -symm.bottomRightCorner(m, m);
  pr.N2 = skew.bottomRightCorner(m, m);
  return {pr, P1};
}

ProperRealization proper_realization(const StaircaseSystem &st) { return split_proper(st).proper; }

StateSpace to_state_space(const ProperRealization &pr)
{
  const auto n2 = pr.n2();
  StateSpace ss;
  ss.D = pr.S2 - pr.N2;
  if (n2 == 0)
  {
    ss.A = Matrix(0, 0);
    ss.B = Matrix(0, pr.G2.cols());
    ss.C = Matrix(pr.G2.cols(), 0);
    return ss;
  }
  Eigen::LLT<Matrix> llt(sym_part(pr.E2));
  if (llt.info() != Eigen::Success)
  {
    throw NumericalError("to_state_space: E2 is not positive definite");
  }
  const auto L = llt.matrixL();
  Matrix A = L.solve(pr.J2 - pr.R2);
  A = L.solve(A.transpose()).transpose();
  ss.A = A;
  ss.B = L.solve(pr.G2 - pr.P2);
  ss.C = L.solve(pr.G2 + pr.P2).transpose();
  return ss;
}

}  // namespace phmor
