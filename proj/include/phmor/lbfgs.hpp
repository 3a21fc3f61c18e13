// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_LBFGS_HPP
#define PHMOR_LBFGS_HPP

#include <functional>

#include "phmor/core.hpp"

namespace phmor
{

struct LbfgsOptions
{
  int max_iterations = 200;
  int memory = 10;
  double grad_tol = 1e-10;    // stop when ||g||_inf <= grad_tol * max(1, |f|)
  double f_tol = 0;           // stop when f <= f_tol
  double rel_decrease = 1e-15;  // stop when the decrease stalls below this relative size
  double armijo = 1e-4;         // sufficient decrease constant of the line search
  int max_backtracks = 40;      // step size trials per line search
};

enum class LbfgsStatus
{
  Converged,
  TargetReached,
  Stalled,
  Budget,
  Stopped,
};

struct LbfgsResult
{
  Vector x;
  double f = 0;
  Vector grad;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::Budget;
};

// Returns f(x) and writes the gradient. A non-finite value rejects the point.
using Objective = std::function<double(const Vector &x, Vector &grad)>;
// Called after every accepted step; returning false stops the run.
using IterationCallback = std::function<bool(int iter, const Vector &x, double f, const Vector &g)>;

///
/// Limited-memory BFGS with a Wolfe line search (ceres GradientProblemSolver).
/// Points where the objective is not finite are rejected and the line search
/// contracts, so infeasible regions are never accepted.
///
LbfgsResult lbfgs_minimize(const Objective &f, Vector x0, const LbfgsOptions &opts = {},
                           const IterationCallback &callback = {});

}  // namespace phmor

#endif  // PHMOR_LBFGS_HPP
