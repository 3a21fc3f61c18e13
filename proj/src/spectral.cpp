// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "phmor/linalg.hpp"
#include "phmor/param.hpp"

namespace phmor
{

namespace
{

constexpr double INF = std::numeric_limits<double>::infinity();
constexpr double POLY_AGREEMENT = 1e-6;
constexpr double IMAG_AXIS_TOL = 1e-6;
constexpr int MAX_BISECTION_STEPS = 100;
const std::vector<double> LIMIT_OMEGAS = {1e6, 1e7, 1e8};

using LD = long double;
using CLD = std::complex<LD>;
using MatrixLD = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
using CMatrixLD = Eigen::Matrix<CLD, Eigen::Dynamic, Eigen::Dynamic>;

CMatrixLD eval_tf_extended(const PHDae &sys, LD omega)
{
  const MatrixLD E = sys.E.cast<LD>(), A = (sys.J - sys.R).cast<LD>();
  const MatrixLD B = (sys.G - sys.P).cast<LD>(), C = (sys.G + sys.P).transpose().cast<LD>();
  CMatrixLD H = (sys.S.cast<LD>() - sys.N.cast<LD>()).cast<CLD>();
  if (sys.n() == 0)
  {
    return H;
  }
  const CLD s(0, omega);
  CMatrixLD pencil = s * E.cast<CLD>() - A.cast<CLD>();
  Eigen::PartialPivLU<CMatrixLD> lu(pencil);
  H += C.cast<CLD>() * lu.solve(B.cast<CLD>());
  return H;
}

// Polynomial extrapolation to h = 0 of samples f(h_k), h_k = 1 / w_k^2.
template <typename M>
M extrapolate(const std::vector<LD> &h, const std::vector<M> &f)
{
  M out = M::Zero(f[0].rows(), f[0].cols());
  for (std::size_t k = 0; k < h.size(); ++k)
  {
    LD weight = 1;
    for (std::size_t j = 0; j < h.size(); ++j)
    {
      if (j != k)
      {
        weight *= h[j] / (h[j] - h[k]);
      }
    }
    out += weight * f[k];
  }
  return out;
}

struct PolyLD
{
  MatrixLD P0, P1;
};

PolyLD limit_extended(const PHDae &sys)
{
  std::vector<LD> h;
  std::vector<MatrixLD> re, slope;
  for (double w : LIMIT_OMEGAS)
  {
    const LD omega = w;
    const CMatrixLD H = eval_tf_extended(sys, omega);
    h.push_back(1 / (omega * omega));
    re.push_back(H.real());
    slope.push_back(H.imag() / omega);
  }
  return {extrapolate(h, re), extrapolate(h, slope)};
}

double sigma_at(const StateSpace &ss, double omega)
{
  return sigma_max(ss.eval(Complex(0, omega)));
}

// Golden-section search for a local maximum of sigma on [a, b].
std::pair<double, double> golden_max(const StateSpace &ss, double a, double b, int iters)
{
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = sigma_at(ss, x1), f2 = sigma_at(ss, x2);
  for (int i = 0; i < iters && (b - a) > 1e-14 * std::max(1.0, b); ++i)
  {
    if (f1 < f2)
    {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = sigma_at(ss, x2);
    }
    else
    {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = sigma_at(ss, x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

Matrix hamiltonian(const StateSpace &ss, double gamma)
{
  const auto n = ss.n();
  const auto m = ss.B.cols(), p = ss.C.rows();
  const Matrix Rg = ss.D.transpose() * ss.D - gamma * gamma * Matrix::Identity(m, m);
  const Matrix Sg = ss.D * ss.D.transpose() - gamma * gamma * Matrix::Identity(p, p);
  const auto Rlu = Rg.partialPivLu();
  const auto Slu = Sg.partialPivLu();
  const Matrix RinvDtC = Rlu.solve(ss.D.transpose() * ss.C);
  const Matrix RinvBt = Rlu.solve(ss.B.transpose());
  Matrix H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = ss.A - ss.B * RinvDtC;
  H.topRightCorner(n, n) = -gamma * ss.B * RinvBt;
  H.bottomLeftCorner(n, n) = gamma * ss.C.transpose() * Slu.solve(ss.C);
  H.bottomRightCorner(n, n) = -ss.A.transpose() + ss.C.transpose() * ss.D * RinvBt;
  return H;
}

}  // namespace

CMatrix eval_tf(const PHDae &sys, Complex s) { return eval_phdae(sys, s); }

double sigma_max(const CMatrix &H)
{
  if (H.size() == 0)
  {
    return 0;
  }
  if (H.size() == 1)
  {
    return std::abs(H(0, 0));
  }
  Eigen::JacobiSVD<CMatrix> svd(H);
  return svd.singularValues()(0);
}

// --- polynomial part -------------------------------------------------------

PolynomialPart polynomial_part(const StaircaseSystem &st)
{
  const ProperSplit split = split_proper(st);
  PolynomialPart pp;
  pp.P0 = split.proper.S2 - split.proper.N2;
  pp.asymmetry = (split.P1 - split.P1.transpose()).norm();
  pp.P1 = sym_part(split.P1);
  return pp;
}

PolynomialPart polynomial_part_limit(const PHDae &sys)
{
  sys.check_dimensions();
  const PolyLD ld = limit_extended(sys);
  PolynomialPart pp;
  pp.P0 = ld.P0.cast<double>();
  const Matrix P1 = ld.P1.cast<double>();
  pp.asymmetry = (P1 - P1.transpose()).norm();
  pp.P1 = sym_part(P1);
  return pp;
}

double polynomial_part_distance(const PolynomialPart &a, const PolynomialPart &b)
{
  const double diff = (a.P0 - b.P0).norm() + (a.P1 - b.P1).norm();
  const double scale = std::max(1.0, a.P0.norm() + a.P1.norm());
  return diff / scale;
}

PolynomialPart polynomial_part(const PHDae &sys, PolyMethod method, const Tolerances &tol)
{
  switch (method)
  {
    case PolyMethod::Staircase: return polynomial_part(to_staircase(sys, tol));
    case PolyMethod::Limit: return polynomial_part_limit(sys);
    case PolyMethod::CrossCheck:
    {
      PolynomialPart st = polynomial_part(to_staircase(sys, tol));
      PolynomialPart lim = polynomial_part_limit(sys);
      const double dist = polynomial_part_distance(st, lim);
      if (dist > POLY_AGREEMENT)
      {
        std::ostringstream msg;
        msg << "polynomial_part: staircase and limit methods differ by " << dist << " (relative)";
        throw MethodDisagreementError(msg.str(), std::move(st), std::move(lim));
      }
      return st;
    }
  }
  return {};
}

std::vector<double> polynomial_residuals(const PHDae &sys, const std::vector<double> &omegas)
{
  const PolyLD pp = limit_extended(sys);
  std::vector<double> out;
  for (double w : omegas)
  {
    const LD omega = w;
    CMatrixLD res = eval_tf_extended(sys, omega);
    res -= pp.P0.cast<CLD>();
    res -= CLD(0, omega) * pp.P1.cast<CLD>();
    out.push_back(static_cast<double>(res.norm()));
  }
  return out;
}

// --- norms -----------------------------------------------------------------

double h2_norm(const StateSpace &ss)
{
  if (ss.D.size() > 0 && ss.D.cwiseAbs().maxCoeff() > 0)
  {
    throw ImproperError("h2_norm: nonzero feedthrough, the H2 norm is infinite");
  }
  if (ss.n() == 0)
  {
    return 0;
  }
  const Matrix X = lyapunov_solve(ss.A, ss.B * ss.B.transpose());
  return std::sqrt(std::max(0.0, (ss.C * X * ss.C.transpose()).trace()));
}

std::vector<double> level_crossings(const StateSpace &ss, double gamma)
{
  std::vector<double> out;
  if (ss.n() == 0 || !(gamma > 0))
  {
    return out;
  }
  Eigen::EigenSolver<Matrix> eig(hamiltonian(ss, gamma), false);
  for (const Complex &lam : eig.eigenvalues())
  {
    if (std::abs(lam.real()) <= IMAG_AXIS_TOL * std::max(1.0, std::abs(lam)) && lam.imag() >= 0)
    {
      out.push_back(lam.imag());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

HinfResult hinf_norm(const StateSpace &ss, double tol_freq)
{
  HinfResult res;
  const double sigma_inf = sigma_max(ss.D.cast<Complex>());
  if (ss.n() == 0)
  {
    res.value = sigma_inf;
    return res;
  }
  Eigen::EigenSolver<Matrix> eigA(ss.A, false);
  const CVector poles = eigA.eigenvalues();
  if (!(poles.real().maxCoeff() < 0))
  {
    throw NotHurwitzError("hinf_norm: realization has poles on or right of the imaginary axis");
  }

  // Lower bound from DC, infinity, the pole frequencies and a coarse sweep.
  double best = sigma_at(ss, 0.0);
  double best_w = 0;
  if (sigma_inf > best)
  {
    best = sigma_inf;
    best_w = INF;
  }
  auto consider = [&](double w)
  {
    const double s = sigma_at(ss, w);
    if (s > best)
    {
      best = s;
      best_w = w;
    }
  };
  double wmin = INF, wmax = 0;
  for (const Complex &p : poles)
  {
    consider(std::abs(p.imag()));
    consider(std::abs(p));
    wmin = std::min(wmin, std::abs(p));
    wmax = std::max(wmax, std::abs(p));
  }
  {
    const double lo = std::log10(std::max(wmin, 1e-300)) - 2, hi = std::log10(wmax) + 2;
    for (int k = 0; k <= 60; ++k)
    {
      consider(std::pow(10.0, lo + (hi - lo) * k / 60.0));
    }
  }
  if (best == 0)
  {
    res.value = 0;
    return res;
  }

  bool stalled = false;
  for (res.iterations = 0; res.iterations < MAX_BISECTION_STEPS; ++res.iterations)
  {
    const double gamma = (1 + 2 * tol_freq) * best;
    const auto cross = level_crossings(ss, gamma);
    if (cross.empty())
    {
      break;
    }
    const double before = best;
    if (cross.size() == 1)
    {
      consider(cross[0]);
    }
    for (std::size_t k = 0; k + 1 < cross.size(); ++k)
    {
      consider(0.5 * (cross[k] + cross[k + 1]));
    }
    if (!(best > before))
    {
      // Crossings that do not sit on the level are eigenvalue noise near
      // the axis; the bound is then already within tolerance.
      bool genuine = false;
      for (double w : cross)
      {
        genuine = genuine || std::abs(sigma_at(ss, w) - gamma) <= 1e-6 * gamma;
      }
      stalled = genuine;
      break;
    }
  }
  if (stalled || res.iterations == MAX_BISECTION_STEPS)
  {
    // Dense sweep, 10^4 points per decade over [1e-4, 1e8], then refine.
    res.used_fallback = true;
    const int count = 120000;
    double grid_w = 0, grid_best = -1;
    for (int k = 0; k <= count; ++k)
    {
      const double w = std::pow(10.0, -4.0 + 12.0 * k / count);
      const double s = sigma_at(ss, w);
      if (s > grid_best)
      {
        grid_best = s;
        grid_w = w;
      }
    }
    const double step = std::pow(10.0, 12.0 / count);
    const auto [w, s] = golden_max(ss, grid_w / step, grid_w * step, 100);
    if (s > best)
    {
      best = s;
      best_w = w;
    }
    if (grid_best > best)
    {
      best = grid_best;
      best_w = grid_w;
    }
  }
  res.value = best;
  res.omega_peak = best_w;
  return res;
}

HinfResult hinf_norm(const PHDae &sys, const Tolerances &tol)
{
  const StaircaseSystem st = to_staircase(sys, tol);
  const ProperSplit split = split_proper(st);
  if (split.P1.norm() > tol.tol_rank * std::max(1.0, sys.E.norm()))
  {
    throw ImproperError("hinf_norm: the transfer function is improper (P1 != 0)");
  }
  return hinf_norm(to_state_space(split.proper), tol.tol_freq);
}

// --- sampling --------------------------------------------------------------

FrequencyGrid FrequencyGrid::logspace(double lo, double hi, std::size_t count)
{
  if (!(lo > 0) || !(hi >= lo) || count == 0)
  {
    throw StructureError("FrequencyGrid::logspace: need 0 < lo <= hi and count >= 1");
  }
  FrequencyGrid g;
  g.lo = lo;
  g.hi = hi;
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t k = 0; k < count; ++k)
  {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    g.omega.push_back(std::pow(10.0, a + (b - a) * t));
  }
  g.omega.erase(std::unique(g.omega.begin(), g.omega.end()), g.omega.end());
  return g;
}

FrequencyGrid FrequencyGrid::from(std::vector<double> omega)
{
  for (double w : omega)
  {
    if (!std::isfinite(w) || w < 0)
    {
      throw StructureError("FrequencyGrid: frequencies must be finite and nonnegative");
    }
  }
  std::sort(omega.begin(), omega.end());
  omega.erase(std::unique(omega.begin(), omega.end()), omega.end());
  FrequencyGrid g;
  g.omega = std::move(omega);
  if (!g.omega.empty())
  {
    g.lo = g.omega.front();
    g.hi = g.omega.back();
  }
  return g;
}

TfSamples sigma_samples(const TransferFunction &H, const FrequencyGrid &grid)
{
  TfSamples out;
  for (double w : grid.omega)
  {
    CMatrix value;
    try
    {
      value = H(Complex(0, w));
    }
    catch (const NumericalError &e)
    {
      std::ostringstream msg;
      msg << "sigma_samples: evaluation failed at omega = " << w << ": " << e.what();
      throw NumericalError(msg.str());
    }
    out.omega.push_back(w);
    out.sigma.push_back(sigma_max(value));
    out.values.push_back(std::move(value));
  }
  return out;
}

TfSamples sigma_samples(const PHDae &sys, const FrequencyGrid &grid)
{
  return sigma_samples([&sys](Complex s) { return eval_tf(sys, s); }, grid);
}

TfSamples sigma_samples(const TransferFunction &H, const TransferFunction &Hr,
                        const FrequencyGrid &grid)
{
  return sigma_samples([&](Complex s) -> CMatrix { return H(s) - Hr(s); }, grid);
}

void TfSamples::write_csv(std::ostream &out) const
{
  const auto rows = values.empty() ? 0 : values.front().rows();
  const auto cols = values.empty() ? 0 : values.front().cols();
  out << "omega,sigma_max";
  for (Eigen::Index i = 0; i < rows; ++i)
  {
    for (Eigen::Index j = 0; j < cols; ++j)
    {
      out << ",re_" << i + 1 << "_" << j + 1 << ",im_" << i + 1 << "_" << j + 1;
    }
  }
  out << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < omega.size(); ++k)
  {
    out << omega[k] << "," << sigma[k];
    for (Eigen::Index i = 0; i < rows; ++i)
    {
      for (Eigen::Index j = 0; j < cols; ++j)
      {
        out << "," << values[k](i, j).real() << "," << values[k](i, j).imag();
      }
    }
    out << "\n";
  }
}

PositiveRealReport positive_real_check(const TransferFunction &H, const FrequencyGrid &grid,
                                       double tol)
{
  PositiveRealReport rep;
  rep.tol = tol;
  rep.min_eig = INF;
  for (double w : grid.omega)
  {
    const CMatrix Hw = H(Complex(0, w));
    const CMatrix herm = Hw + Hw.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
    const double lam = eig.eigenvalues().minCoeff();
    if (lam < rep.min_eig)
    {
      rep.min_eig = lam;
      rep.omega_at_min = w;
    }
  }
  rep.pass = rep.min_eig >= -tol;
  return rep;
}

}  // namespace phmor
