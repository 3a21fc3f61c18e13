// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_CERTIFY_HPP
#define PHMOR_CERTIFY_HPP

#include "phmor/fom_model.hpp"

namespace phmor
{

// Mismatch is tolerated up to this factor times (1 + ||reference||_F).
constexpr double POLY_MATCH_TOL = 1e-8;

// Realization of H - Hr from the two proper parts:
// A = diag(A, Ar), B = [B; Br], C = [C, -Cr], D = D - Dr.
StateSpace error_system(const StateSpace &full, const StateSpace &rom);

// ||P1 - P1r||_F / (1 + ||P1||_F), and the same for P0.
double p1_mismatch(const PolynomialPart &full, const PolynomialPart &rom);
double p0_mismatch(const PolynomialPart &full, const PolynomialPart &rom);

// H-infinity norm of H - Hr. ImproperError if the improper parts differ.
HinfResult certify_hinf(const ProperData &full, const ProperData &rom, double tol_freq = 1e-8);

// H2 norm of H - Hr. ImproperError unless both P0 and P1 match.
double certify_h2(const ProperData &full, const ProperData &rom);

}  // namespace phmor

#endif  // PHMOR_CERTIFY_HPP
