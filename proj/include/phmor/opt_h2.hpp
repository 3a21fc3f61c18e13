// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_OPT_H2_HPP
#define PHMOR_OPT_H2_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "phmor/fom_model.hpp"
#include "phmor/lbfgs.hpp"
#include "phmor/linalg.hpp"
#include "phmor/param.hpp"

namespace phmor
{

struct H2Options
{
  int max_iterations = 3000;
  double time_limit = 0;  // seconds, 0 = unlimited
  double grad_tol = 1e-14;
  double target = 0;  // stop once the H2 error is at most this
  int lbfgs_memory = 15;
};

///
/// Strictly proper FOM (A, B, C) and a Theta whose feedthrough and improper
/// part are pinned, so that H - Hr = C (sI - A)^{-1} B - Cr (sI - Ar)^{-1} Br.
/// The Schur forms and Gramian of the FOM are computed once.
///
class H2Problem
{
public:
  H2Problem(const StateSpace &fom, Theta theta, H2Options opts = {});
  // Uses the proper realization of the FOM with P0 dropped; checks that
  // theta reproduces P0 and P1.
  H2Problem(const ProperData &fom, Theta theta, H2Options opts = {});

  const StateSpace &fom() const { return fom_; }
  const Theta &theta() const { return theta_; }
  const H2Options &options() const { return opts_; }
  double fom_norm_sq() const { return fom_sq_; }

  std::function<void(const Theta &)> on_iterate;

  // Solvers for A Y + Y Ar^T + .. = 0 and A^T Q + Q Ar + .. = 0.
  const SylvesterSolver &solver_A() const { return *solve_A_; }
  const SylvesterSolver &solver_At() const { return *solve_At_; }

private:
  StateSpace fom_;
  Theta theta_;
  H2Options opts_;
  double fom_sq_ = 0;
  std::shared_ptr<SylvesterSolver> solve_A_, solve_At_;
};

// Spectral abscissa of Jh - Rh above which a point is rejected.
constexpr double H2_HURWITZ_MARGIN = 1e-12;

// ||H - Hr||_H2^2, or +inf when Jh - Rh is not Hurwitz (with margin).
double h2_error_sq(const H2Problem &problem, const Theta &theta);

// Value and gradient over all theta entries (frozen ones included).
double h2_error_sq_full(const H2Problem &problem, const Theta &theta, Vector *grad);

// Gradient over the free entries in free_indices() order.
Vector h2_gradient(const H2Problem &problem, const Theta &theta);

struct H2TraceRow
{
  int iter = 0;
  double objective = 0;  // squared error
  double grad_norm = 0;
  double error = 0;
};

struct H2Result
{
  Theta theta;
  double error = 0;  // ||H - Hr||_H2
  double error_initial = 0;
  std::vector<H2TraceRow> trace;
  bool budget = false;
  LbfgsStatus status = LbfgsStatus::Budget;

  // Header: iter,objective,grad_norm,h2_error
  void write_trace_csv(std::ostream &out) const;
};

H2Result minimize_h2(const H2Problem &problem);

}  // namespace phmor

#endif  // PHMOR_OPT_H2_HPP
