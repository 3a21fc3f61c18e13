// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_CORE_HPP
#define PHMOR_CORE_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phmor/errors.hpp"

namespace phmor
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

///
/// Port-Hamiltonian descriptor system
///
///   E x' = (J - R) x + (G - P) u,
///   y    = (G + P)^T x + (S - N) u,
///
/// with E = E^T >= 0, J = -J^T, N = -N^T and [[R, P], [P^T, S]] >= 0.
///
struct PHDae
{
  Matrix E, J, R, G, P, S, N;

  Eigen::Index n() const { return E.rows(); }
  Eigen::Index m() const { return G.cols(); }

  // Throws StructureError if the block shapes do not fit together.
  void check_dimensions() const;

  // [[R, P], [P^T, S]]
  Matrix dissipation_matrix() const;
};

// Plain state-space realization with identity mass matrix,
// H(s) = C (sI - A)^{-1} B + D.
struct StateSpace
{
  Matrix A, B, C, D;

  Eigen::Index n() const { return A.rows(); }
  CMatrix eval(Complex s) const;
};

struct Tolerances
{
  double tol_sym = 1e-10;
  double tol_psd = 1e-10;
  double tol_rank = 1e-8;
  double tol_freq = 1e-8;

  void check() const;
};

struct ValidationReport
{
  struct Item
  {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
  };

  std::vector<Item> items;
  bool pass = true;
  double min_eig_E = 0;
  double min_eig_W = 0;

  // Residual of the named check; throws std::out_of_range if absent.
  double residual(const std::string &name) const;
  std::string to_string() const;
};

struct ValidateOptions
{
  bool check_regularity = false;
  unsigned seed = 1;
};

///
/// Checks the pH structure conditions. Residuals reported:
///   skew_J = ||J + J^T||_F, skew_N = ||N + N^T||_F, sym_E = ||E - E^T||_F,
///   psd_E = max(0, -lambda_min(E)), psd_W = max(0, -lambda_min(W)),
/// and, when requested, regular = max(0, IRREGULAR_RCOND - pencil_rcond(sys)).
/// Tolerances are scaled by (1 + ||.||_F) of the matrix being tested.
///
ValidationReport validate(const PHDae &sys, const Tolerances &tol = {},
                          const ValidateOptions &opts = {});

// Reciprocal condition estimate of sE - (J - R) at a pseudo-random s scaled to
// the pencil; close to zero for singular (irregular) pencils.
double pencil_rcond(const PHDae &sys, unsigned seed = 1);

// Pencils with pencil_rcond below this are treated as singular.
constexpr double IRREGULAR_RCOND = 1e-13;

// Smallest eigenvalue of the symmetric part of M (+inf for empty M).
double min_sym_eigenvalue(const Matrix &M);

inline Matrix sym_part(const Matrix &M) { return 0.5 * (M + M.transpose()); }
inline Matrix skew_part(const Matrix &M) { return 0.5 * (M - M.transpose()); }

}  // namespace phmor

#endif  // PHMOR_CORE_HPP
