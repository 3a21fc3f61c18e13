// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/certify.hpp"

#include <sstream>

namespace phmor
{

StateSpace error_system(const StateSpace &full, const StateSpace &rom)
{
  const auto n = full.n(), r = rom.n();
  const auto m = full.B.cols(), p = full.D.rows();
  if (rom.D.rows() != p || rom.D.cols() != m)
  {
    throw StructureError("error_system: port dimensions differ");
  }
  StateSpace e;
  e.A = Matrix::Zero(n + r, n + r);
  e.A.topLeftCorner(n, n) = full.A;
  e.A.bottomRightCorner(r, r) = rom.A;
  e.B.resize(n + r, m);
  e.B << full.B, rom.B;
  e.C.resize(p, n + r);
  e.C << full.C, -rom.C;
  e.D = full.D - rom.D;
  return e;
}

double p1_mismatch(const PolynomialPart &full, const PolynomialPart &rom)
{
  return (full.P1 - rom.P1).norm() / (1 + full.P1.norm());
}

double p0_mismatch(const PolynomialPart &full, const PolynomialPart &rom)
{
  return (full.P0 - rom.P0).norm() / (1 + full.P0.norm());
}

HinfResult certify_hinf(const ProperData &full, const ProperData &rom, double tol_freq)
{
  const double mis = p1_mismatch(full.poly, rom.poly);
  if (mis > POLY_MATCH_TOL)
  {
    std::ostringstream msg;
    msg << "certify: improper parts differ (relative P1 mismatch " << mis
        << "), the H-infinity error is infinite";
    throw ImproperError(msg.str());
  }
  return hinf_norm(error_system(full.ss, rom.ss), tol_freq);
}

double certify_h2(const ProperData &full, const ProperData &rom)
{
  const double mis1 = p1_mismatch(full.poly, rom.poly);
  const double mis0 = p0_mismatch(full.poly, rom.poly);
  if (mis1 > POLY_MATCH_TOL || mis0 > POLY_MATCH_TOL)
  {
    std::ostringstream msg;
    msg << "certify: polynomial parts differ (relative P0 mismatch " << mis0 << ", P1 mismatch "
        << mis1 << "), the H2 error is infinite";
    throw ImproperError(msg.str());
  }
  StateSpace e = error_system(full.ss, rom.ss);
  e.D.setZero();
  return h2_norm(e);
}

}  // namespace phmor
