// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "phmor/certify.hpp"

namespace phmor
{

namespace
{

constexpr double INF = std::numeric_limits<double>::infinity();

Eigen::Index numerical_rank(const Matrix &P, double tol_rank)
{
  if (P.size() == 0)
  {
    return 0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(P), Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k)
  {
    rank += eig.eigenvalues()(k) > tol_rank * std::max(top, 1e-300) && top > 0 ? 1 : 0;
  }
  return rank;
}

double certify_or_inf(const FomModel &fom, const Theta &theta, double tol_freq)
{
  try
  {
    return certify_theta(fom, theta, tol_freq).value;
  }
  catch (const NumericalError &)
  {
    return INF;
  }
}

// H2 descent with P0 pinned, then the feedthrough is released again. Falls
// back to the given theta when the H2 problem is not defined (P0 not
// pinnable, FOM proper part not Hurwitz) or does not improve the H-infinity error.
Theta warm_start(const FomModel &fom, const RunConfig &cfg, const Theta &theta0, std::string &note)
{
  const PolynomialPart &pp = fom.poly();
  try
  {
    const Theta pinned =
        pin_polynomial_part(theta0, pp.P0, pp.P1, PinMode::H2, cfg.tol.tol_rank, cfg.tol.tol_psd);
    H2Options opts = cfg.h2;
    opts.max_iterations = std::min(opts.max_iterations, cfg.warm_start_iterations);
    const H2Result res = minimize_h2(H2Problem(fom.proper(), pinned, opts));
    Theta out = theta0;
    out.values = res.theta.values;
    const double before = certify_or_inf(fom, theta0, cfg.tol.tol_freq);
    const double after = certify_or_inf(fom, out, cfg.tol.tol_freq);
    if (after <= before)
    {
      return out;
    }
    note = "H2 warm start discarded (no H-infinity improvement)";
  }
  catch (const Error &e)
  {
    note = std::string("H2 warm start skipped: ") + e.what();
  }
  return theta0;
}

SeedRun run_seed(const FomModel &fom, const RunConfig &cfg, std::uint64_t seed)
{
  SeedRun run;
  run.seed = seed;
  const Theta theta0 = initial_theta(fom, cfg, seed);
  std::ostringstream trace;
  if (cfg.method == Method::Hinf)
  {
    HinfProblem prob;
    prob.fom = &fom;
    prob.theta = theta0;
    if (cfg.pin && cfg.warm_start_iterations > 0)
    {
      prob.theta = warm_start(fom, cfg, theta0, run.note);
    }
    prob.omega = initial_grid(fom);
    prob.opts = cfg.hinf;
    prob.opts.tol_freq = cfg.tol.tol_freq;
    const HinfRunResult res = minimize_hinf(prob);
    res.write_trace_csv(trace);
    run.theta = res.theta;
    run.error = res.certified;
    run.error_initial = certify_or_inf(fom, theta0, cfg.tol.tol_freq);
    run.budget = res.budget;
    if (!std::isfinite(res.certified))
    {
      try
      {
        certify_theta(fom, res.theta, cfg.tol.tol_freq);
      }
      catch (const Error &e)
      {
        run.note = e.what();
      }
    }
  }
  else
  {
    const H2Problem prob(fom.proper(), theta0, cfg.h2);
    const H2Result res = minimize_h2(prob);
    res.write_trace_csv(trace);
    run.theta = res.theta;
    run.error_initial = res.error_initial;
    run.budget = res.budget;
    try
    {
      run.error = certify_h2(fom.proper(), proper_data(assemble_rom(res.theta)));
    }
    catch (const Error &e)
    {
      run.error = INF;
      run.note = e.what();
    }
  }
  run.trace_csv = trace.str();
  return run;
}

}  // namespace

Method parse_method(const std::string &name)
{
  if (name == "hinf")
  {
    return Method::Hinf;
  }
  if (name == "h2")
  {
    return Method::H2;
  }
  throw StructureError("unknown method '" + name + "' (expected hinf or h2)");
}

const char *to_string(Method method) { return method == Method::Hinf ? "hinf" : "h2"; }

void RunConfig::check() const
{
  tol.check();
  if (r < 0)
  {
    throw StructureError("RunConfig: order r must be nonnegative");
  }
  if (seeds.empty())
  {
    throw StructureError("RunConfig: need at least one seed");
  }
  if (hinf.max_outer <= 0 || hinf.inner_iterations <= 0 || hinf.max_total_iterations <= 0 ||
      h2.max_iterations <= 0)
  {
    throw StructureError("RunConfig: iteration budgets must be positive");
  }
  if (method == Method::H2 && !pin)
  {
    throw StructureError("RunConfig: the H2 method requires polynomial-part pinning");
  }
}

unsigned worker_count(unsigned requested, std::size_t jobs)
{
  unsigned n = requested;
  if (n == 0)
  {
    if (const char *env = std::getenv("PHMOR_THREADS"))
    {
      n = static_cast<unsigned>(std::max(1L, std::strtol(env, nullptr, 10)));
    }
    else
    {
      n = std::max(1u, std::thread::hardware_concurrency());
    }
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

Theta initial_theta(const FomModel &fom, const RunConfig &cfg, std::uint64_t seed)
{
  const PolynomialPart &pp = fom.poly();
  const Eigen::Index m = fom.m();
  if (!cfg.pin)
  {
    const Eigen::Index ell = std::max<Eigen::Index>(cfg.ell, 0);
    return init_theta(cfg.r, m, ell, cfg.init, seed);
  }
  const Eigen::Index rank = numerical_rank(pp.P1, cfg.tol.tol_rank);
  if (cfg.ell >= 0 && cfg.ell != rank)
  {
    std::ostringstream msg;
    msg << "requested ell = " << cfg.ell << " but rank(P1) = " << rank
        << "; matching the improper part needs ell = rank(P1)";
    throw StructureError(msg.str());
  }
  Theta theta = init_theta(cfg.r, m, rank, cfg.init, seed);
  if (cfg.method == Method::H2)
  {
    return pin_polynomial_part(theta, pp.P0, pp.P1, PinMode::H2, cfg.tol.tol_rank, cfg.tol.tol_psd);
  }
  theta = pin_polynomial_part(theta, pp.P0, pp.P1, PinMode::Hinf, cfg.tol.tol_rank, cfg.tol.tol_psd);
  return seed_feedthrough(theta, pp.P0);
}

ReduceResult run_reduce(const FomModel &fom, const RunConfig &cfg)
{
  cfg.check();
  ReduceResult out;
  out.method = cfg.method;
  out.fom_poly = fom.poly();
  const std::size_t jobs = cfg.seeds.size();
  const unsigned workers = worker_count(cfg.threads, jobs);
  out.runs.resize(jobs);
  for (std::size_t first = 0; first < jobs; first += workers)
  {
    std::vector<std::future<SeedRun>> batch;
    for (std::size_t k = first; k < std::min(jobs, first + workers); ++k)
    {
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                 run_seed, std::cref(fom), std::cref(cfg), cfg.seeds[k]));
    }
    for (std::size_t k = 0; k < batch.size(); ++k)
    {
      out.runs[first + k] = batch[k].get();
    }
  }
  for (std::size_t k = 1; k < jobs; ++k)
  {
    if (out.runs[k].error < out.runs[out.best].error)
    {
      out.best = k;
    }
  }
  return out;
}

CertifyReport run_certify(const ProperData &fom, const ProperData &rom, bool want_hinf,
                          bool want_h2, double tol_freq)
{
  CertifyReport rep;
  rep.p0_mismatch = p0_mismatch(fom.poly, rom.poly);
  rep.p1_mismatch = p1_mismatch(fom.poly, rom.poly);
  if (want_hinf)
  {
    try
    {
      rep.hinf = certify_hinf(fom, rom, tol_freq);
    }
    catch (const NumericalError &e)
    {
      rep.hinf_refusal = e.what();
    }
  }
  if (want_h2)
  {
    try
    {
      rep.h2 = certify_h2(fom, rom);
    }
    catch (const NumericalError &e)
    {
      rep.h2_refusal = e.what();
    }
  }
  return rep;
}

}  // namespace phmor
