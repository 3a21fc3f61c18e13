// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_STAIRCASE_HPP
#define PHMOR_STAIRCASE_HPP

#include <array>

#include "phmor/core.hpp"

namespace phmor
{

struct StaircaseDims
{
  Eigen::Index n1 = 0, n2 = 0, n3 = 0, n4 = 0;

  Eigen::Index total() const { return n1 + n2 + n3 + n4; }
  // Offset of block k (1-based) in the transformed state.
  Eigen::Index offset(int k) const;
  Eigen::Index size(int k) const;
  bool operator==(const StaircaseDims &) const = default;
};

///
/// A pH-DAE in staircase coordinates x_s = T x:
///
///        [E11 E12 0 0]        [J11 J12 J13 J14]        [R11 R12 R13 0]
///   Es = [E21 E22 0 0]   Js = [J21 J22 J23  0 ]   Rs = [R21 R22 R23 0]
///        [ 0   0  0 0]        [J31 J32 J33  0 ]        [R31 R32 R33 0]
///        [ 0   0  0 0]        [J41  0   0   0 ]        [ 0   0   0  0]
///
/// with Gs = T G, Ps = T P (fourth block of Ps zero), [[E11,E12],[E21,E22]]
/// positive definite and J41, J33 - R33 invertible.
///
struct StaircaseSystem
{
  StaircaseDims dims;
  Matrix T;
  PHDae sys;  // transformed matrices

  Matrix E_block(int i, int j) const { return block(sys.E, i, j); }
  Matrix J_block(int i, int j) const { return block(sys.J, i, j); }
  Matrix R_block(int i, int j) const { return block(sys.R, i, j); }
  Matrix G_block(int k) const { return rows(sys.G, k); }
  Matrix P_block(int k) const { return rows(sys.P, k); }

private:
  Matrix block(const Matrix &M, int i, int j) const;
  Matrix rows(const Matrix &M, int k) const;
};

struct StaircaseCheck
{
  double orthogonality = 0;     // ||T^T T - I||_F
  double e_block_min_eig = 0;   // lambda_min of the leading E block (+inf if empty)
  double j41_min_sv = 0;        // sigma_min(J41) (+inf if empty)
  double a33_min_sv = 0;        // sigma_min(J33 - R33) (+inf if empty)
  double zero_pattern = 0;      // Frobenius norm of entries that must vanish
  double reassembly = 0;        // relative ||T^T (.)_s T - (.)||_F over all matrices
  bool pass = false;
};

// Computes the staircase form by orthogonal transformations. Throws
// RankAmbiguityError if a rank decision is ambiguous and SingularError for
// irregular pencils.
StaircaseSystem to_staircase(const PHDae &sys, const Tolerances &tol = {});

// Wraps a system that is already in staircase form (T = I) after checking
// the block invariants.
StaircaseSystem from_blocks(const PHDae &sys, const StaircaseDims &dims,
                            const Tolerances &tol = {});

StaircaseCheck check_staircase(const StaircaseSystem &st, const PHDae &source,
                               const Tolerances &tol = {});

// Differentiation index of the uncontrolled system, 0, 1 or 2.
int index_of(const StaircaseSystem &st);
int index_of(const StaircaseDims &dims);

///
/// Implicit pH-ODE of dimension n2 realizing the proper part of the transfer
/// function (E2 positive definite).
///
struct ProperRealization
{
  Matrix E2, J2, R2, G2, P2, S2, N2;

  Eigen::Index n2() const { return E2.rows(); }
  PHDae to_phdae() const { return {E2, J2, R2, G2, P2, S2, N2}; }
};

struct ProperSplit
{
  ProperRealization proper;
  Matrix P1;  // coefficient of the improper term, H = H_p + P1 s
};

// Eliminates x4 and x1 through J41, then x3 through J33 - R33, by
// pH-preserving congruences and Schur complements.
ProperSplit split_proper(const StaircaseSystem &st);

ProperRealization proper_realization(const StaircaseSystem &st);

// E2 = L L^T; returns (L^{-1} (J2 - R2) L^{-T}, L^{-1}(G2 - P2), (G2 + P2)^T L^{-T}, S2 - N2).
StateSpace to_state_space(const ProperRealization &pr);

}  // namespace phmor

#endif  // PHMOR_STAIRCASE_HPP
