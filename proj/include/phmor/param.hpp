// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_PARAM_HPP
#define PHMOR_PARAM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "phmor/core.hpp"

namespace phmor
{

// Row-wise fill of the upper triangle (diagonal included) of an n x n matrix.
Matrix vtu(const Vector &v, Eigen::Index n);
// Row-wise fill of the strict upper triangle of an n x n matrix.
Matrix vtsu(const Vector &v, Eigen::Index n);
// Row-major reshape into a (len / cols) x cols matrix.
Matrix vtf(const Vector &v, Eigen::Index cols);

enum class Segment
{
  J,
  W,
  G,
  N,
  L
};

///
/// Parameter vector of a reduced pH-DAE with proper order r, m ports and an
/// improper part of rank ell. Stored as one flat vector
/// [theta_J, theta_W, theta_G, theta_N, theta_L] with a per-entry frozen mask;
/// frozen entries are never touched by the optimizers.
///
struct Theta
{
  Eigen::Index r = 0, m = 0, ell = 0;
  Vector values;
  std::vector<bool> frozen;

  static Eigen::Index segment_size(Segment seg, Eigen::Index r, Eigen::Index m, Eigen::Index ell);
  static Eigen::Index total_size(Eigen::Index r, Eigen::Index m, Eigen::Index ell);
  static Theta zeros(Eigen::Index r, Eigen::Index m, Eigen::Index ell);

  Eigen::Index segment_size(Segment seg) const { return segment_size(seg, r, m, ell); }
  Eigen::Index segment_offset(Segment seg) const;
  Vector segment(Segment seg) const;
  void set_segment(Segment seg, const Vector &v);
  bool segment_frozen(Segment seg) const;
  void freeze_segment(Segment seg, bool value = true);

  // Position of U(i, j), i <= j, of vtu(theta_W) in the flat vector.
  Eigen::Index w_index(Eigen::Index i, Eigen::Index j) const;

  std::vector<Eigen::Index> free_indices() const;
  Vector free_values() const;
  Theta with_free_values(const Vector &free) const;

  // Throws StructureError unless the lengths match the (r, m, ell) partition.
  void check() const;
};

///
/// Reduced pH-DAE assembled from Theta. State x = (x1, x2, x3) of size
/// r + 2 ell with E = diag(I_r, I_ell, 0), J = [[Jh, 0, 0], [0, 0, -I], [0, I, 0]],
/// R = diag(Rh, 0, 0), G = [Gh; 0; L^T], P = [Ph; 0; 0].
///
struct RomSystem
{
  Eigen::Index r = 0, m = 0, ell = 0;
  Matrix Jh, Rh, Gh, Ph, S, N;
  Matrix U;  // vtu(theta_W)
  Matrix W;  // U U^T = [[Rh, Ph], [Ph^T, S]]
  Matrix L;  // m x ell

  PHDae to_phdae() const;
  // Proper part (Jh - Rh, Gh - Ph, (Gh + Ph)^T, S - N).
  StateSpace proper() const;
  Matrix improper() const { return L * L.transpose(); }
  CMatrix transfer(Complex s) const;
};

RomSystem assemble_rom(const Theta &theta);

// H_r(s) = (Gh + Ph)^T (sI - (Jh - Rh))^{-1} (Gh - Ph) + (S - N) + L L^T s.
CMatrix rom_transfer(const Theta &theta, Complex s);

// Full-DAE resolvent (G + P)^T (sE - (J - R))^{-1} (G - P) + (S - N).
CMatrix eval_phdae(const PHDae &sys, Complex s);

enum class PinMode
{
  Hinf,
  H2
};

///
/// Matches the polynomial part P0 + P1 s. Both modes set ell = rank(P1) and
/// freeze theta_L with L L^T = P1. The H2 mode additionally freezes the
/// trailing m x m block of vtu(theta_W) to the upper-triangular factor of
/// sym(P0) and theta_N to -skew(P0), so that S - N = P0.
///
Theta pin_polynomial_part(const Theta &theta, const Matrix &P0, const Matrix &P1, PinMode mode,
                          double tol_rank = 1e-8, double tol_psd = 1e-10);

// Writes the feedthrough S - N = P0 into theta (unfrozen). Used as a starting
// point when P0 is not pinned; requires sym(P0) PSD.
Theta seed_feedthrough(const Theta &theta, const Matrix &P0);

enum class InitStrategy
{
  IdentityDissipative,
  Random
};

InitStrategy parse_init_strategy(const std::string &name);

Theta init_theta(Eigen::Index r, Eigen::Index m, Eigen::Index ell, InitStrategy strategy,
                 std::uint64_t seed);

// Upper-triangular U with U U^T = S for symmetric PSD S, nonnegative diagonal.
Matrix upper_factor(const Matrix &S);

// Factor L (m x rank) with L L^T = P for symmetric PSD P.
Matrix low_rank_factor(const Matrix &P, double tol_rank = 1e-8);

///
/// Derivatives of a scalar objective with respect to the blocks of a
/// RomSystem. P1 refers to the improper coefficient L L^T.
///
struct RomGradient
{
  Matrix Jh, Rh, Gh, Ph, S, N, P1;

  static RomGradient zeros(const RomSystem &rom);
};

// Chain rule through the parameter maps; returns the gradient over all
// entries of theta (frozen ones included).
Vector chain_to_theta(const Theta &theta, const RomSystem &rom, const RomGradient &grad);

}  // namespace phmor

#endif  // PHMOR_PARAM_HPP
