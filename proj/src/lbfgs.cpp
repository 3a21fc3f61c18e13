// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/lbfgs.hpp"

#include <cmath>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

namespace phmor
{

namespace
{

// Adapts an Objective to ceres and remembers the last evaluated point, so
// the per-iteration callback can report the gradient without re-evaluating.
class Function : public ceres::FirstOrderFunction
{
public:
  Function(const Objective &f, int n) : f_(f), n_(n) {}

  bool Evaluate(const double *x, double *cost, double *gradient) const override
  {
    last_x_ = Eigen::Map<const Vector>(x, n_);
    last_g_.resize(n_);
    last_f_ = f_(last_x_, last_g_);
    ++evaluations_;
    if (!std::isfinite(last_f_))
    {
      return false;
    }
    *cost = last_f_;
    if (gradient != nullptr)
    {
      Eigen::Map<Vector>(gradient, n_) = last_g_;
    }
    return true;
  }

  int NumParameters() const override { return n_; }

  // f and gradient at x, reusing the last evaluation when it was at x.
  double at(const Vector &x, Vector &g) const
  {
    if (last_x_.size() != x.size() || last_x_ != x || !std::isfinite(last_f_))
    {
      last_x_ = x;
      last_g_.resize(n_);
      last_f_ = f_(last_x_, last_g_);
      ++evaluations_;
    }
    g = last_g_;
    return last_f_;
  }

  int evaluations() const { return evaluations_; }

private:
  const Objective &f_;
  int n_;
  mutable Vector last_x_, last_g_;
  mutable double last_f_ = 0;
  mutable int evaluations_ = 0;
};

class Callback : public ceres::IterationCallback
{
public:
  Callback(const Function &fn, const double *x, int n, const LbfgsOptions &opts,
           const phmor::IterationCallback &user)
    : fn_(fn), x_(x), n_(n), opts_(opts), user_(user)
  {
  }

  ceres::CallbackReturnType operator()(const ceres::IterationSummary &s) override
  {
    if (s.iteration == 0 || !s.step_is_successful)
    {
      return ceres::SOLVER_CONTINUE;
    }
    const Vector x = Eigen::Map<const Vector>(x_, n_);
    Vector g;
    const double f = fn_.at(x, g);
    if (user_ && !user_(s.iteration, x, f, g))
    {
      stopped = true;
      return ceres::SOLVER_ABORT;
    }
    if (f <= opts_.f_tol)
    {
      target = true;
      return ceres::SOLVER_TERMINATE_SUCCESSFULLY;
    }
    return ceres::SOLVER_CONTINUE;
  }

  bool stopped = false, target = false;

private:
  const Function &fn_;
  const double *x_;
  int n_;
  const LbfgsOptions &opts_;
  const phmor::IterationCallback &user_;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective &f, Vector x0, const LbfgsOptions &opts,
                           const IterationCallback &callback)
{
  LbfgsResult res;
  res.x = std::move(x0);
  const int n = static_cast<int>(res.x.size());
  res.grad = Vector::Zero(n);
  res.f = f(res.x, res.grad);
  res.evaluations = 1;
  if (!std::isfinite(res.f))
  {
    throw NumericalError("lbfgs: objective is not finite at the starting point");
  }
  if (n == 0)
  {
    res.status = LbfgsStatus::Converged;
    return res;
  }
  if (res.f <= opts.f_tol)
  {
    res.status = LbfgsStatus::TargetReached;
    return res;
  }

  auto *fn = new Function(f, n);  // owned by the problem
  const ceres::GradientProblem problem(fn);
  Callback cb(*fn, res.x.data(), n, opts, callback);

  ceres::GradientProblemSolver::Options o;
  o.line_search_direction_type = ceres::LBFGS;
  o.line_search_type = ceres::WOLFE;
  o.max_lbfgs_rank = opts.memory;
  o.max_num_iterations = opts.max_iterations;
  o.line_search_sufficient_function_decrease = opts.armijo;
  o.max_num_line_search_step_size_iterations = opts.max_backtracks;
  o.function_tolerance = opts.rel_decrease;
  o.gradient_tolerance = opts.grad_tol * std::max(1.0, std::abs(res.f));
  o.parameter_tolerance = 0;
  o.logging_type = ceres::SILENT;
  o.update_state_every_iteration = true;
  o.callbacks.push_back(&cb);

  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(o, problem, res.x.data(), &summary);

  res.f = fn->at(res.x, res.grad);
  res.iterations = static_cast<int>(summary.iterations.size()) - 1;
  res.evaluations += fn->evaluations();
  if (cb.stopped)
  {
    res.status = LbfgsStatus::Stopped;
  }
  else if (cb.target)
  {
    res.status = LbfgsStatus::TargetReached;
  }
  else if (summary.termination_type == ceres::NO_CONVERGENCE)
  {
    res.status = LbfgsStatus::Budget;
  }
  else if (summary.termination_type == ceres::CONVERGENCE &&
           res.grad.lpNorm<Eigen::Infinity>() <= o.gradient_tolerance)
  {
    res.status = LbfgsStatus::Converged;
  }
  else
  {
    res.status = LbfgsStatus::Stalled;
  }
  return res;
}

}  // namespace phmor
