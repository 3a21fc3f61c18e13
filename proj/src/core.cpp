// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/core.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace phmor
{

namespace
{

void require_shape(const Matrix &M, Eigen::Index rows, Eigen::Index cols, const char *name)
{
  if (M.rows() != rows || M.cols() != cols)
  {
    std::ostringstream msg;
    msg << "PHDae: matrix " << name << " is " << M.rows() << "x" << M.cols() << ", expected "
        << rows << "x" << cols;
    throw StructureError(msg.str());
  }
}

}  // namespace

void PHDae::check_dimensions() const
{
  const auto nn = E.rows();
  const auto mm = G.cols();
  require_shape(E, nn, nn, "E");
  require_shape(J, nn, nn, "J");
  require_shape(R, nn, nn, "R");
  require_shape(G, nn, mm, "G");
  require_shape(P, nn, mm, "P");
  require_shape(S, mm, mm, "S");
  require_shape(N, mm, mm, "N");
}

Matrix PHDae::dissipation_matrix() const
{
  const auto nn = n();
  const auto mm = m();
  Matrix W(nn + mm, nn + mm);
  W << R, P, P.transpose(), S;
  return W;
}

CMatrix StateSpace::eval(Complex s) const
{
  const auto nn = A.rows();
  CMatrix D_c = D.cast<Complex>();
  if (nn == 0)
  {
    return D_c;
  }
  CMatrix pencil = s * CMatrix::Identity(nn, nn) - A.cast<Complex>();
  Eigen::PartialPivLU<CMatrix> lu(pencil);
  return C.cast<Complex>() * lu.solve(B.cast<Complex>()) + D_c;
}

void Tolerances::check() const
{
  if (!(tol_sym >= 0 && tol_psd >= 0 && tol_rank >= 0 && tol_freq >= 0))
  {
    throw StructureError("Tolerances: all tolerances must be nonnegative");
  }
}

double ValidationReport::residual(const std::string &name) const
{
  for (const auto &item : items)
  {
    if (item.name == name)
    {
      return item.residual;
    }
  }
  throw std::out_of_range("ValidationReport: no check named " + name);
}

std::string ValidationReport::to_string() const
{
  std::ostringstream out;
  out << std::setprecision(6);
  for (const auto &item : items)
  {
    out << (item.pass ? "PASS " : "FAIL ") << std::left << std::setw(12) << item.name
        << " residual=" << item.residual << " tol=" << item.tolerance << "\n";
  }
  out << (pass ? "structure: OK" : "structure: VIOLATED") << "\n";
  return out.str();
}

double min_sym_eigenvalue(const Matrix &M)
{
  if (M.size() == 0)
  {
    return std::numeric_limits<double>::infinity();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(M), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double pencil_rcond(const PHDae &sys, unsigned seed)
{
  if (sys.n() == 0)
  {
    return 1.0;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  const Matrix A = sys.J - sys.R;
  const double scale = std::max(1.0, A.norm() / std::max(sys.E.norm(), 1e-300));
  const Complex s(unif(rng) * scale, unif(rng) * scale);
  CMatrix M = s * sys.E.cast<Complex>() - A.cast<Complex>();
  // Row then column equilibration, so badly scaled but regular pencils are
  // not mistaken for singular ones.
  for (Eigen::Index i = 0; i < M.rows(); ++i)
  {
    const double top = M.row(i).cwiseAbs().maxCoeff();
    if (top > 0)
    {
      M.row(i) /= top;
    }
  }
  for (Eigen::Index j = 0; j < M.cols(); ++j)
  {
    const double top = M.col(j).cwiseAbs().maxCoeff();
    if (top > 0)
    {
      M.col(j) /= top;
    }
  }
  Eigen::FullPivLU<CMatrix> lu(M);
  if (!lu.isInvertible())
  {
    return 0.0;
  }
  return lu.rcond();
}

ValidationReport validate(const PHDae &sys, const Tolerances &tol, const ValidateOptions &opts)
{
  sys.check_dimensions();
  tol.check();

  ValidationReport report;
  auto add = [&report](std::string name, double residual, double tolerance)
  {
    const bool ok = residual <= tolerance;
    report.items.push_back({std::move(name), residual, tolerance, ok});
    report.pass = report.pass && ok;
  };

  add("skew_J", (sys.J + sys.J.transpose()).norm(), tol.tol_sym * (1 + sys.J.norm()));
  add("skew_N", (sys.N + sys.N.transpose()).norm(), tol.tol_sym * (1 + sys.N.norm()));
  add("sym_E", (sys.E - sys.E.transpose()).norm(), tol.tol_sym * (1 + sys.E.norm()));

  report.min_eig_E = sys.n() > 0 ? min_sym_eigenvalue(sys.E) : 0.0;
  add("psd_E", std::max(0.0, -report.min_eig_E), tol.tol_psd * (1 + sys.E.norm()));
  const Matrix W = sys.dissipation_matrix();
  report.min_eig_W = W.size() > 0 ? min_sym_eigenvalue(W) : 0.0;
  add("psd_W", std::max(0.0, -report.min_eig_W), tol.tol_psd * (1 + W.norm()));

  if (opts.check_regularity && sys.n() > 0)
  {
    add("regular", std::max(0.0, IRREGULAR_RCOND - pencil_rcond(sys, opts.seed)), 0.0);
  }
  return report;
}

}  // namespace phmor
