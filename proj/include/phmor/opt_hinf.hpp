// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_OPT_HINF_HPP
#define PHMOR_OPT_HINF_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "phmor/certify.hpp"
#include "phmor/fom_model.hpp"
#include "phmor/lbfgs.hpp"
#include "phmor/param.hpp"

namespace phmor
{

struct HinfOptions
{
  int max_outer = 150;           // gamma updates
  int inner_iterations = 400;    // L-BFGS iterations per level
  int max_total_iterations = 20000;
  double time_limit = 0;         // seconds, 0 = unlimited
  double beta = 0.9;             // gamma <- beta * achieved level on success
  double level_margin = 0.05;    // inner problems target gamma (1 - margin)
  double bisection_tol = 1e-3;   // stop when failed and achieved levels are this close
  double target = 0;             // stop once the certified error is at most this
  double tol_freq = 1e-8;
  int lbfgs_memory = 12;
};

///
/// Sampled H-infinity problem. Theta should have theta_L frozen to the
/// improper part of the FOM; otherwise the error is unbounded and only the
/// sampled objective is meaningful.
///
struct HinfProblem
{
  const FomModel *fom = nullptr;
  Theta theta;
  FrequencyGrid omega;
  double gamma0 = 0;  // <= 0: certified error at theta
  HinfOptions opts;
  // Called with every accepted iterate of every inner run.
  std::function<void(const Theta &)> on_iterate;
};

struct HinfTraceRow
{
  int iter = 0;
  double gamma = 0;      // best achieved sampled level so far
  double objective = 0;  // inner objective at exit
  double grad_norm = 0;
  double certified = 0;  // certified error of the current iterate (+inf if unavailable)
};

struct HinfRunResult
{
  Theta theta;
  double gamma = 0;      // final achieved sampled level
  double certified = 0;  // certified ||H - Hr||_Hinf of theta
  double certified_initial = 0;
  double omega_peak = 0;
  FrequencyGrid omega;
  std::vector<HinfTraceRow> trace;
  bool budget = false;
  int inner_iterations = 0;

  // Header: iter,gamma,objective,grad_norm,certified_error
  void write_trace_csv(std::ostream &out) const;
};

// Error H(i w) - Hr(i w) built from the cached FOM samples.
CMatrix hinf_error_sample(const FomModel &fom, const RomSystem &rom, double omega);

// sum over the grid of max(0, sigma_max(H - Hr) - gamma)^2.
double hinf_objective(const FomModel &fom, const Theta &theta, double gamma,
                      const FrequencyGrid &omega);

// Objective and its gradient over all theta entries (frozen ones included).
double hinf_objective_full(const FomModel &fom, const Theta &theta, double gamma,
                           const FrequencyGrid &omega, Vector *grad);

// Gradient restricted to the free entries, in free_indices() order.
Vector hinf_gradient(const FomModel &fom, const Theta &theta, double gamma,
                     const FrequencyGrid &omega);

// Largest sampled error over the grid.
double max_sampled_error(const FomModel &fom, const Theta &theta, const FrequencyGrid &omega);

// Certified error; +inf if the error system is unstable. Throws ImproperError
// when the improper parts differ.
HinfResult certify_theta(const FomModel &fom, const Theta &theta, double tol_freq = 1e-8);

///
/// Adds up to 8 frequencies where the error exceeds gamma between samples:
/// the certified peak first, then midpoints of the level-gamma crossing
/// intervals. Returns the grid unchanged when the certified error is <= gamma.
///
FrequencyGrid adapt_grid(const FrequencyGrid &omega, const StateSpace &error,
                         const HinfResult &certified, double gamma);
FrequencyGrid adapt_grid(const FrequencyGrid &omega, const FomModel &fom, const Theta &theta,
                         double gamma);

// 40 log-spaced points in [1e-3, 1e4] plus local maxima of a coarse sweep of
// the FOM's proper part.
FrequencyGrid initial_grid(const FomModel &fom);

HinfRunResult minimize_hinf(const HinfProblem &problem);

}  // namespace phmor

#endif  // PHMOR_OPT_HINF_HPP
