// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/opt_hinf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <Eigen/SVD>

namespace phmor
{

namespace
{

constexpr double INF = std::numeric_limits<double>::infinity();
constexpr double DEGENERATE_SV = 1e-8;
constexpr std::size_t MAX_NEW_POINTS = 8;

struct SampleTerms
{
  double sigma = 0;
  // Top singular pairs (averaged when sigma_max is repeated).
  std::vector<CVector> u, v;
};

SampleTerms top_singular(const CMatrix &E)
{
  SampleTerms t;
  if (E.cols() == 1 || E.rows() == 1)
  {
    Eigen::JacobiSVD<CMatrix> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
    t.sigma = svd.singularValues()(0);
    t.u.push_back(svd.matrixU().col(0));
    t.v.push_back(svd.matrixV().col(0));
    return t;
  }
  Eigen::JacobiSVD<CMatrix> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sv = svd.singularValues();
  t.sigma = sv(0);
  for (Eigen::Index k = 0; k < sv.size(); ++k)
  {
    if (sv(0) - sv(k) > DEGENERATE_SV * std::max(sv(0), 1e-300))
    {
      break;
    }
    t.u.push_back(svd.matrixU().col(k));
    t.v.push_back(svd.matrixV().col(k));
  }
  return t;
}

}  // namespace

CMatrix hinf_error_sample(const FomModel &fom, const RomSystem &rom, double omega)
{
  const Complex s(0, omega);
  CMatrix E = fom.proper_sample(omega) + s * (fom.poly().P1 - rom.improper()).cast<Complex>();
  E -= rom.proper().eval(s);
  return E;
}

double hinf_objective_full(const FomModel &fom, const Theta &theta, double gamma,
                           const FrequencyGrid &omega, Vector *grad)
{
  const RomSystem rom = assemble_rom(theta);
  const auto r = rom.r;
  const StateSpace ss = rom.proper();
  RomGradient g = RomGradient::zeros(rom);
  Matrix gA = Matrix::Zero(r, r), gB = Matrix::Zero(r, rom.m), gC = Matrix::Zero(rom.m, r);
  Matrix gD = Matrix::Zero(rom.m, rom.m);
  double value = 0;
  for (double w : omega.omega)
  {
    const Complex s(0, w);
    CMatrix X;
    CMatrix E = fom.proper_sample(w) + s * (fom.poly().P1 - rom.improper()).cast<Complex>() -
                ss.D.cast<Complex>();
    if (r > 0)
    {
      Eigen::PartialPivLU<CMatrix> lu(s * CMatrix::Identity(r, r) - ss.A.cast<Complex>());
      X = lu.inverse();
      E -= ss.C.cast<Complex>() * X * ss.B.cast<Complex>();
    }
    if (!grad)
    {
      const double sig = sigma_max(E);
      value += sig > gamma ? (sig - gamma) * (sig - gamma) : 0.0;
      continue;
    }
    const SampleTerms t = top_singular(E);
    if (!(t.sigma > gamma))
    {
      continue;
    }
    value += (t.sigma - gamma) * (t.sigma - gamma);
    // d sigma = -Re(u^H dHr v); averaged over the degenerate subspace.
    const double weight = -2 * (t.sigma - gamma) / static_cast<double>(t.u.size());
    for (std::size_t k = 0; k < t.u.size(); ++k)
    {
      const CVector &u = t.u[k], &v = t.v[k];
      const CMatrix uv = u.conjugate() * v.transpose();
      gD += weight * uv.real();
      g.P1 += weight * (s * uv).real();
      if (r > 0)
      {
        const CVector a = X * (ss.B.cast<Complex>() * v);
        const CVector b = X.adjoint() * (ss.C.transpose().cast<Complex>() * u);
        gC += weight * (u.conjugate() * a.transpose()).real();
        gA += weight * (b.conjugate() * a.transpose()).real();
        gB += weight * (b.conjugate() * v.transpose()).real();
      }
    }
  }
  if (grad)
  {
    // A = Jh - Rh, B = Gh - Ph, C = (Gh + Ph)^T, D = S - N.
    g.Jh = gA;
    g.Rh = -gA;
    g.Gh = gB + gC.transpose();
    g.Ph = gC.transpose() - gB;
    g.S = gD;
    g.N = -gD;
    *grad = chain_to_theta(theta, rom, g);
  }
  return value;
}

double hinf_objective(const FomModel &fom, const Theta &theta, double gamma,
                      const FrequencyGrid &omega)
{
  return hinf_objective_full(fom, theta, gamma, omega, nullptr);
}

Vector hinf_gradient(const FomModel &fom, const Theta &theta, double gamma,
                     const FrequencyGrid &omega)
{
  Vector full;
  hinf_objective_full(fom, theta, gamma, omega, &full);
  const auto idx = theta.free_indices();
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
  {
    out(static_cast<Eigen::Index>(k)) = full(idx[k]);
  }
  return out;
}

double max_sampled_error(const FomModel &fom, const Theta &theta, const FrequencyGrid &omega)
{
  const RomSystem rom = assemble_rom(theta);
  double best = 0;
  for (double w : omega.omega)
  {
    best = std::max(best, sigma_max(hinf_error_sample(fom, rom, w)));
  }
  return best;
}

HinfResult certify_theta(const FomModel &fom, const Theta &theta, double tol_freq)
{
  const RomSystem rom = assemble_rom(theta);
  try
  {
    return certify_hinf(fom.proper(), proper_data(rom), tol_freq);
  }
  catch (const NotHurwitzError &)
  {
    HinfResult res;
    res.value = INF;
    return res;
  }
}

FrequencyGrid adapt_grid(const FrequencyGrid &omega, const StateSpace &error,
                         const HinfResult &certified, double gamma)
{
  if (!(certified.value > gamma))
  {
    return omega;
  }
  std::vector<double> candidates;
  if (std::isfinite(certified.omega_peak))
  {
    candidates.push_back(certified.omega_peak);
  }
  if (std::isfinite(certified.value))
  {
    const auto cross = level_crossings(error, gamma);
    if (cross.size() == 1)
    {
      candidates.push_back(cross[0]);
    }
    for (std::size_t k = 0; k + 1 < cross.size(); ++k)
    {
      candidates.push_back(0.5 * (cross[k] + cross[k + 1]));
    }
  }
  std::vector<double> out = omega.omega;
  std::size_t added = 0;
  for (double w : candidates)
  {
    if (added == MAX_NEW_POINTS)
    {
      break;
    }
    const bool present = std::any_of(out.begin(), out.end(), [w](double x)
                                     { return std::abs(x - w) <= 1e-10 * std::max(1.0, w); });
    if (!present)
    {
      out.push_back(w);
      ++added;
    }
  }
  FrequencyGrid g = FrequencyGrid::from(std::move(out));
  g.lo = std::min(g.lo, omega.lo);
  g.hi = std::max(g.hi, omega.hi);
  return g;
}

FrequencyGrid adapt_grid(const FrequencyGrid &omega, const FomModel &fom, const Theta &theta,
                         double gamma)
{
  const ProperData rom = proper_data(assemble_rom(theta));
  const StateSpace err = error_system(fom.proper().ss, rom.ss);
  HinfResult cert;
  try
  {
    cert = certify_hinf(fom.proper(), rom);
  }
  catch (const NotHurwitzError &)
  {
    return omega;
  }
  return adapt_grid(omega, err, cert, gamma);
}

FrequencyGrid initial_grid(const FomModel &fom)
{
  std::vector<double> w = FrequencyGrid::logspace(1e-3, 1e4, 40).omega;
  const FrequencyGrid sweep = FrequencyGrid::logspace(1e-3, 1e4, 351);
  const StateSpace &ss = fom.proper().ss;
  std::vector<double> sig;
  for (double x : sweep.omega)
  {
    sig.push_back(sigma_max(ss.eval(Complex(0, x))));
  }
  for (std::size_t k = 1; k + 1 < sig.size(); ++k)
  {
    if (sig[k] > sig[k - 1] && sig[k] >= sig[k + 1])
    {
      w.push_back(sweep.omega[k]);
    }
  }
  FrequencyGrid g = FrequencyGrid::from(std::move(w));
  g.lo = 1e-3;
  g.hi = 1e4;
  return g;
}

void HinfRunResult::write_trace_csv(std::ostream &out) const
{
  out << "iter,gamma,objective,grad_norm,certified_error\n" << std::setprecision(17);
  for (const auto &row : trace)
  {
    out << row.iter << "," << row.gamma << "," << row.objective << "," << row.grad_norm << ","
        << row.certified << "\n";
  }
}

namespace
{

// Certified error, +inf when the error is not certifiable (improper or unstable).
HinfResult certify_or_inf(const FomModel &fom, const Theta &theta, double tol_freq)
{
  try
  {
    return certify_theta(fom, theta, tol_freq);
  }
  catch (const ImproperError &)
  {
    HinfResult res;
    res.value = INF;
    return res;
  }
}

}  // namespace

HinfRunResult minimize_hinf(const HinfProblem &problem)
{
  if (!problem.fom)
  {
    throw StructureError("minimize_hinf: no FOM given");
  }
  if (problem.omega.size() == 0)
  {
    throw StructureError("minimize_hinf: empty frequency grid");
  }
  problem.theta.check();
  const FomModel &fom = *problem.fom;
  const HinfOptions &opts = problem.opts;
  if (!(opts.beta > 0 && opts.beta < 1) || !(opts.level_margin >= 0 && opts.level_margin < 1))
  {
    throw StructureError("minimize_hinf: need 0 < beta < 1 and 0 <= level_margin < 1");
  }
  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&]
  {
    if (opts.time_limit <= 0)
    {
      return false;
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    return dt.count() > opts.time_limit;
  };

  HinfRunResult res;
  res.omega = problem.omega;
  Theta theta = problem.theta;
  HinfResult cert = certify_or_inf(fom, theta, opts.tol_freq);
  res.certified_initial = cert.value;
  res.theta = theta;
  res.certified = cert.value;
  res.omega_peak = cert.omega_peak;

  double achieved = max_sampled_error(fom, theta, res.omega);
  double gamma = problem.gamma0 > 0 ? problem.gamma0 : cert.value;
  if (!std::isfinite(gamma))
  {
    gamma = achieved;
  }
  gamma = std::min(gamma, achieved);
  double failed = 0;  // largest level known to be out of reach
  res.gamma = achieved;
  res.trace.push_back({0, achieved, 0, 0, cert.value});

  LbfgsOptions lopts;
  lopts.memory = opts.lbfgs_memory;
  lopts.f_tol = 0;
  lopts.grad_tol = 1e-14;
  for (int outer = 1; outer <= opts.max_outer; ++outer)
  {
    if (res.certified <= opts.target || !(gamma > 0))
    {
      break;
    }
    if (res.inner_iterations >= opts.max_total_iterations || out_of_time())
    {
      res.budget = true;
      break;
    }
    const double level = gamma * (1 - opts.level_margin);
    lopts.max_iterations = std::min(opts.inner_iterations,
                                    opts.max_total_iterations - res.inner_iterations);
    const Objective f = [&](const Vector &x, Vector &g) -> double
    {
      const Theta th = theta.with_free_values(x);
      Vector full;
      const double v = hinf_objective_full(fom, th, level, res.omega, &full);
      const auto idx = th.free_indices();
      for (std::size_t k = 0; k < idx.size(); ++k)
      {
        g(static_cast<Eigen::Index>(k)) = full(idx[k]);
      }
      return v;
    };
    const IterationCallback cb = [&](int, const Vector &x, double, const Vector &) -> bool
    {
      if (problem.on_iterate)
      {
        problem.on_iterate(theta.with_free_values(x));
      }
      return !out_of_time();
    };
    const LbfgsResult lr = lbfgs_minimize(f, theta.free_values(), lopts, cb);
    res.inner_iterations += lr.iterations;
    theta = theta.with_free_values(lr.x);

    const double sampled = max_sampled_error(fom, theta, res.omega);
    HinfTraceRow row;
    row.iter = outer;
    row.objective = lr.f;
    row.grad_norm = lr.grad.norm();
    if (sampled <= gamma)
    {
      const ProperData rom = proper_data(assemble_rom(theta));
      HinfResult c = certify_or_inf(fom, theta, opts.tol_freq);
      if (c.value < res.certified)
      {
        res.certified = c.value;
        res.omega_peak = c.omega_peak;
        res.theta = theta;
      }
      if (std::isfinite(c.value))
      {
        res.omega = adapt_grid(res.omega, error_system(fom.proper().ss, rom.ss), c, gamma);
      }
      achieved = std::min(achieved, sampled);
      row.certified = c.value;
      if (sampled <= failed)
      {
        failed = 0;
      }
      gamma = opts.beta * sampled;
      if (failed > 0 && gamma <= failed)
      {
        gamma = 0.5 * (failed + sampled);
      }
      if (failed > 0 && sampled - failed <= opts.bisection_tol * sampled)
      {
        row.gamma = achieved;
        res.trace.push_back(row);
        break;
      }
    }
    else
    {
      failed = std::max(failed, gamma);
      row.certified = INF;
      const double hi = achieved;
      if (hi - failed <= opts.bisection_tol * hi)
      {
        row.gamma = achieved;
        res.trace.push_back(row);
        break;
      }
      gamma = 0.5 * (failed + hi);
      // Restart from the best certified iterate to keep progress sound.
      theta = res.theta;
    }
    row.gamma = achieved;
    res.trace.push_back(row);
  }
  res.gamma = achieved;
  return res;
}

}  // namespace phmor
