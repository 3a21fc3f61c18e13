// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_SPECTRAL_HPP
#define PHMOR_SPECTRAL_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "phmor/core.hpp"
#include "phmor/staircase.hpp"

namespace phmor
{

// H(s) = (G + P)^T (sE - (J - R))^{-1} (G - P) + (S - N).
CMatrix eval_tf(const PHDae &sys, Complex s);

using TransferFunction = std::function<CMatrix(Complex)>;

double sigma_max(const CMatrix &H);

/// H = H_sp + P0 + P1 s with H_sp strictly proper.
struct PolynomialPart
{
  Matrix P0, P1;
  double asymmetry = 0;  // ||P1 - P1^T||_F before symmetrization
};

enum class PolyMethod
{
  Staircase,   // read off the staircase elimination
  Limit,       // Richardson extrapolation of H(i w) at w = 1e6, 1e7, 1e8
  CrossCheck,  // both; throws MethodDisagreementError beyond 1e-6 relative
};

class MethodDisagreementError : public NumericalError
{
public:
  MethodDisagreementError(const std::string &what, PolynomialPart staircase, PolynomialPart limit)
    : NumericalError(what), staircase_(std::move(staircase)), limit_(std::move(limit))
  {
  }
  const PolynomialPart &staircase() const { return staircase_; }
  const PolynomialPart &limit() const { return limit_; }

private:
  PolynomialPart staircase_, limit_;
};

PolynomialPart polynomial_part(const PHDae &sys, PolyMethod method = PolyMethod::Staircase,
                               const Tolerances &tol = {});
PolynomialPart polynomial_part(const StaircaseSystem &st);
PolynomialPart polynomial_part_limit(const PHDae &sys);

// (||dP0|| + ||dP1||) / max(1, ||P0|| + ||P1||)
double polynomial_part_distance(const PolynomialPart &a, const PolynomialPart &b);

// ||H(i w) - P0 - P1 i w||_F at the given frequencies, with H and the
// extrapolated polynomial part evaluated in extended precision.
std::vector<double> polynomial_residuals(const PHDae &sys, const std::vector<double> &omegas);

// H2 norm of a strictly proper, stable realization (D must vanish).
double h2_norm(const StateSpace &ss);

struct HinfResult
{
  double value = 0;
  double omega_peak = 0;  // +inf when the supremum is attained at infinity
  int iterations = 0;
  bool used_fallback = false;
};

///
/// Level-set bisection on the imaginary eigenvalues of the Hamiltonian
/// matrix of (A, B, C, D), iterated from a sampled lower bound until no
/// crossing remains at (1 + 2 tol_freq) times the bound. Falls back to a
/// dense log grid plus golden-section refinement when the iteration stalls.
///
HinfResult hinf_norm(const StateSpace &ss, double tol_freq = 1e-8);

// H-infinity norm of the proper part of a pH-DAE; ImproperError if P1 != 0.
HinfResult hinf_norm(const PHDae &sys, const Tolerances &tol = {});

// Nonnegative w at which some singular value of H(i w) equals gamma.
std::vector<double> level_crossings(const StateSpace &ss, double gamma);

struct FrequencyGrid
{
  std::vector<double> omega;
  double lo = 0, hi = 0;

  static FrequencyGrid logspace(double lo, double hi, std::size_t count);
  // Sorts, removes duplicates and rejects negative or non-finite entries.
  static FrequencyGrid from(std::vector<double> omega);
  std::size_t size() const { return omega.size(); }
};

struct TfSamples
{
  std::vector<double> omega;
  std::vector<CMatrix> values;
  std::vector<double> sigma;

  // Header: omega,sigma_max,re_1_1,im_1_1,re_1_2,...  (row-major entries)
  void write_csv(std::ostream &out) const;
};

TfSamples sigma_samples(const TransferFunction &H, const FrequencyGrid &grid);
TfSamples sigma_samples(const PHDae &sys, const FrequencyGrid &grid);
// Samples of the error H - Hr.
TfSamples sigma_samples(const TransferFunction &H, const TransferFunction &Hr,
                        const FrequencyGrid &grid);

struct PositiveRealReport
{
  double min_eig = 0;  // min over the grid of lambda_min(H + H^H)
  double omega_at_min = 0;
  double tol = 0;
  bool pass = false;
};

PositiveRealReport positive_real_check(const TransferFunction &H, const FrequencyGrid &grid,
                                       double tol = 1e-10);

}  // namespace phmor

#endif  // PHMOR_SPECTRAL_HPP
