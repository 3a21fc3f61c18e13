// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/opt_h2.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "phmor/certify.hpp"

namespace phmor
{

namespace
{

constexpr double INF = std::numeric_limits<double>::infinity();

}  // namespace

H2Problem::H2Problem(const StateSpace &fom, Theta theta, H2Options opts)
  : fom_(fom), theta_(std::move(theta)), opts_(opts)
{
  theta_.check();
  if (fom_.B.cols() != theta_.m || fom_.C.rows() != theta_.m)
  {
    throw StructureError("H2Problem: port dimension of theta does not match the FOM");
  }
  fom_.D = Matrix::Zero(theta_.m, theta_.m);
  solve_A_ = std::make_shared<SylvesterSolver>(fom_.A);
  solve_At_ = std::make_shared<SylvesterSolver>(Matrix(fom_.A.transpose()));
  if (fom_.n() > 0)
  {
    const Matrix X = lyapunov_solve(fom_.A, fom_.B * fom_.B.transpose());
    fom_sq_ = (fom_.C * X * fom_.C.transpose()).trace();
  }
}

H2Problem::H2Problem(const ProperData &fom, Theta theta, H2Options opts)
  : H2Problem(fom.ss, std::move(theta), opts)
{
  const ProperData rom = proper_data(assemble_rom(theta_));
  const double mis0 = p0_mismatch(fom.poly, rom.poly), mis1 = p1_mismatch(fom.poly, rom.poly);
  if (mis0 > POLY_MATCH_TOL || mis1 > POLY_MATCH_TOL)
  {
    std::ostringstream msg;
    msg << "H2Problem: theta does not reproduce the polynomial part (relative P0 mismatch "
        << mis0 << ", P1 mismatch " << mis1 << "); pin it first";
    throw ImproperError(msg.str());
  }
}

double h2_error_sq_full(const H2Problem &problem, const Theta &theta, Vector *grad)
{
  const RomSystem rom = assemble_rom(theta);
  const StateSpace &F = problem.fom();
  const Matrix Ar = rom.Jh - rom.Rh;
  const Matrix Br = rom.Gh - rom.Ph;
  const Matrix Cr = (rom.Gh + rom.Ph).transpose();
  if (rom.r == 0)
  {
    if (grad)
    {
      *grad = Vector::Zero(theta.values.size());
    }
    return problem.fom_norm_sq();
  }
  if (!is_hurwitz(Ar, H2_HURWITZ_MARGIN))
  {
    return INF;
  }
  const Matrix Xr = lyapunov_solve(Ar, Br * Br.transpose());
  const Matrix Y = problem.solver_A().solve(Ar, F.B * Br.transpose());
  const double value = problem.fom_norm_sq() - 2 * (F.C * Y * Cr.transpose()).trace() +
                       (Cr * Xr * Cr.transpose()).trace();
  if (grad)
  {
    // Adjoints: A^T Q12 + Q12 Ar - C^T Cr = 0, Ar^T Q22 + Q22 Ar + Cr^T Cr = 0.
    const Matrix Q12 = problem.solver_At().solve(Ar.transpose(), -F.C.transpose() * Cr);
    const Matrix Q22 = lyapunov_solve(Ar.transpose(), Cr.transpose() * Cr);
    const Matrix gA = 2 * (Q12.transpose() * Y + Q22 * Xr);
    const Matrix gB = 2 * (Q12.transpose() * F.B + Q22 * Br);
    const Matrix gC = 2 * (Cr * Xr - F.C * Y);
    RomGradient g = RomGradient::zeros(rom);
    g.Jh = gA;
    g.Rh = -gA;
    g.Gh = gB + gC.transpose();
    g.Ph = gC.transpose() - gB;
    *grad = chain_to_theta(theta, rom, g);
  }
  return value;
}

double h2_error_sq(const H2Problem &problem, const Theta &theta)
{
  return h2_error_sq_full(problem, theta, nullptr);
}

Vector h2_gradient(const H2Problem &problem, const Theta &theta)
{
  Vector full;
  if (!std::isfinite(h2_error_sq_full(problem, theta, &full)))
  {
    throw NotHurwitzError("h2_gradient: Jh - Rh is not Hurwitz, the error is undefined");
  }
  const auto idx = theta.free_indices();
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
  {
    out(static_cast<Eigen::Index>(k)) = full(idx[k]);
  }
  return out;
}

void H2Result::write_trace_csv(std::ostream &out) const
{
  out << "iter,objective,grad_norm,h2_error\n" << std::setprecision(17);
  for (const auto &row : trace)
  {
    out << row.iter << "," << row.objective << "," << row.grad_norm << "," << row.error << "\n";
  }
}

H2Result minimize_h2(const H2Problem &problem)
{
  const H2Options &opts = problem.options();
  const Theta &theta0 = problem.theta();
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
  auto error_of = [](double sq) { return std::sqrt(std::max(0.0, sq)); };

  const Objective f = [&](const Vector &x, Vector &g) -> double
  {
    const Theta th = theta0.with_free_values(x);
    Vector full;
    const double v = h2_error_sq_full(problem, th, &full);
    if (!std::isfinite(v))
    {
      return v;
    }
    const auto idx = th.free_indices();
    for (std::size_t k = 0; k < idx.size(); ++k)
    {
      g(static_cast<Eigen::Index>(k)) = full(idx[k]);
    }
    return v;
  };

  H2Result res;
  Vector g0(static_cast<Eigen::Index>(theta0.free_indices().size()));
  const double f0 = f(theta0.free_values(), g0);
  if (!std::isfinite(f0))
  {
    throw NotHurwitzError("minimize_h2: the initial reduced model is not asymptotically stable");
  }
  res.error_initial = error_of(f0);
  res.trace.push_back({0, f0, g0.norm(), res.error_initial});

  LbfgsOptions lopts;
  lopts.max_iterations = opts.max_iterations;
  lopts.memory = opts.lbfgs_memory;
  lopts.grad_tol = opts.grad_tol;
  lopts.f_tol = opts.target * opts.target;
  lopts.rel_decrease = 0;
  const IterationCallback cb = [&](int iter, const Vector &x, double fx, const Vector &g) -> bool
  {
    res.trace.push_back({iter, fx, g.norm(), error_of(fx)});
    if (problem.on_iterate)
    {
      problem.on_iterate(theta0.with_free_values(x));
    }
    return !out_of_time();
  };
  const LbfgsResult lr = lbfgs_minimize(f, theta0.free_values(), lopts, cb);
  res.theta = theta0.with_free_values(lr.x);
  res.error = error_of(lr.f);
  res.status = lr.status;
  res.budget = lr.status == LbfgsStatus::Budget || lr.status == LbfgsStatus::Stopped;
  return res;
}

}  // namespace phmor
