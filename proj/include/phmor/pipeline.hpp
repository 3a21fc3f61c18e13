// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_PIPELINE_HPP
#define PHMOR_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phmor/opt_h2.hpp"
#include "phmor/opt_hinf.hpp"

namespace phmor
{

enum class Method
{
  Hinf,
  H2
};

Method parse_method(const std::string &name);
const char *to_string(Method method);

struct RunConfig
{
  Method method = Method::Hinf;
  Eigen::Index r = 0;
  Eigen::Index ell = -1;  // -1: rank(P1)
  Tolerances tol;
  InitStrategy init = InitStrategy::Random;
  std::vector<std::uint64_t> seeds = {1};
  bool pin = true;  // match the polynomial part (P1 always, P0 too for H2)
  HinfOptions hinf;
  H2Options h2;
  // H-infinity mode: run up to this many H2 iterations (P0 temporarily
  // pinned) before the H-infinity loop; 0 disables the warm start.
  int warm_start_iterations = 1000;
  unsigned threads = 0;  // 0: PHMOR_THREADS or the hardware concurrency

  void check() const;
};

struct SeedRun
{
  std::uint64_t seed = 0;
  Theta theta;
  double error = 0;          // certified error of the method's norm (+inf if refused)
  double error_initial = 0;  // same at the initial theta
  bool budget = false;
  std::string trace_csv;
  std::string note;  // reason when the error could not be certified
};

struct ReduceResult
{
  Method method = Method::Hinf;
  PolynomialPart fom_poly;
  std::vector<SeedRun> runs;
  std::size_t best = 0;

  const SeedRun &best_run() const { return runs.at(best); }
};

// Number of worker threads for seed restarts: PHMOR_THREADS if set, else the
// hardware concurrency, never more than `jobs`.
unsigned worker_count(unsigned requested, std::size_t jobs);

// Runs the configured optimizer from every seed (in parallel) and keeps the
// run with the smallest certified error; ties go to the earlier seed.
ReduceResult run_reduce(const FomModel &fom, const RunConfig &cfg);

// Initial theta for one seed: init_theta plus polynomial-part pinning.
Theta initial_theta(const FomModel &fom, const RunConfig &cfg, std::uint64_t seed);

struct CertifyReport
{
  std::optional<HinfResult> hinf;
  std::optional<double> h2;
  std::string hinf_refusal, h2_refusal;
  double p0_mismatch = 0, p1_mismatch = 0;
};

CertifyReport run_certify(const ProperData &fom, const ProperData &rom, bool want_hinf,
                          bool want_h2, double tol_freq = 1e-8);

}  // namespace phmor

#endif  // PHMOR_PIPELINE_HPP
