// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <sstream>

#include <doctest.h>

#include "oracles.hpp"
#include "phmor/bench.hpp"
#include "phmor/certify.hpp"
#include "phmor/fom_model.hpp"
#include "phmor/opt_h2.hpp"

using namespace phmor;

namespace
{

StateSpace first_order()
{
  return {Matrix::Constant(1, 1, -1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1)};
}

// Hr = g^2 / (s + a^2).
Theta scalar_rom(double a, double g)
{
  Theta th = Theta::zeros(1, 1, 0);
  th.values(th.w_index(0, 0)) = a;
  th.set_segment(Segment::G, Vector::Constant(1, g));
  return th;
}

// Random theta with a positive definite W block, so Jh - Rh is Hurwitz.
Theta random_theta(Eigen::Index r, Eigen::Index m, std::mt19937_64 &rng)
{
  Theta th = Theta::zeros(r, m, 0);
  th.values = random_normal(th.values.size(), 1, rng);
  for (Eigen::Index i = 0; i < r + m; ++i)
  {
    th.values(th.w_index(i, i)) = 1.0 + std::abs(th.values(th.w_index(i, i)));
  }
  return th;
}

}  // namespace

TEST_CASE("h2_error_sq: analytic scalar values")
{
  const H2Problem zero(first_order(), Theta::zeros(0, 1, 0));
  CHECK(h2_error_sq(zero, zero.theta()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(zero.fom_norm_sq() == doctest::Approx(0.5).epsilon(1e-14));
  const Theta half = scalar_rom(std::sqrt(2.0), 1.0);
  const H2Problem p(first_order(), half);
  CHECK(h2_error_sq(p, half) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(std::abs(h2_error_sq(p, scalar_rom(1.0, 1.0))) < 1e-14);
  // Rh = 0: pole on the imaginary axis.
  CHECK(std::isinf(h2_error_sq(p, scalar_rom(0.0, 1.0))));
}

TEST_CASE("h2 gradient: scalar symbolic derivative")
{
  // e^2 = 1/2 + g^4/(2 rho) - 2 g^2/(1 + rho), rho = a^2.
  const double a = 1.2, g = 0.8, rho = a * a;
  const Theta th = scalar_rom(a, g);
  const H2Problem p(first_order(), th);
  const double d_g = 4 * g * g * g / (2 * rho) - 4 * g / (1 + rho);
  const double d_rho = -std::pow(g, 4) / (2 * rho * rho) + 2 * g * g / std::pow(1 + rho, 2);
  Vector full;
  const double f = h2_error_sq_full(p, th, &full);
  CHECK(f == doctest::Approx(0.5 + std::pow(g, 4) / (2 * rho) - 2 * g * g / (1 + rho)).epsilon(1e-13));
  CHECK(full(th.segment_offset(Segment::G)) == doctest::Approx(d_g).epsilon(1e-10));
  CHECK(full(th.w_index(0, 0)) == doctest::Approx(d_rho * 2 * a).epsilon(1e-10));
}

TEST_CASE("h2 gradient matches central differences")
{
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial)
  {
    const Eigen::Index r = 3, m = 1 + trial % 2;
    StateSpace fom;
    oracle::random_stable(6, m, rng, fom.A, fom.B, fom.C);
    fom.D = Matrix::Zero(m, m);
    const Theta th = random_theta(r, m, rng);
    const H2Problem p(fom, th);
    const Vector g = h2_gradient(p, th);
    const Vector fd = oracle::fd_gradient(
        [&](const Vector &x) { return h2_error_sq(p, th.with_free_values(x)); }, th.free_values());
    CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("h2_error_sq equals the squared H2 norm of the explicit error system")
{
  std::mt19937_64 rng(8);
  StateSpace fom;
  oracle::random_stable(7, 2, rng, fom.A, fom.B, fom.C);
  fom.D = Matrix::Zero(2, 2);
  Theta th = random_theta(4, 2, rng);
  // Feedthrough off: zero the trailing m x m block of U and theta_N.
  for (Eigen::Index i = 4; i < 6; ++i)
  {
    for (Eigen::Index j = i; j < 6; ++j)
    {
      th.values(th.w_index(i, j)) = 0;
    }
    for (Eigen::Index j = 0; j < 4; ++j)
    {
      th.values(th.w_index(j, i)) = 0.3 * th.values(th.w_index(j, i));
    }
  }
  th.set_segment(Segment::N, Vector::Zero(th.segment_size(Segment::N)));
  const H2Problem p(fom, th);
  StateSpace rom = assemble_rom(th).proper();
  rom.D.setZero();
  const double direct = h2_norm(error_system(fom, rom));
  CHECK(h2_error_sq(p, th) == doctest::Approx(direct * direct).epsilon(1e-10));
}

TEST_CASE("h2_error_sq is invariant under a state transformation of the FOM")
{
  std::mt19937_64 rng(9);
  StateSpace fom;
  oracle::random_stable(5, 1, rng, fom.A, fom.B, fom.C);
  fom.D = Matrix::Zero(1, 1);
  Matrix T = random_normal(5, 5, rng) + 5 * Matrix::Identity(5, 5);
  const Matrix Ti = T.inverse();
  const StateSpace moved{T * fom.A * Ti, T * fom.B, fom.C * Ti, fom.D};
  const Theta th = random_theta(2, 1, rng);
  const double a = h2_error_sq(H2Problem(fom, th), th);
  const double b = h2_error_sq(H2Problem(moved, th), th);
  CHECK(b == doctest::Approx(a).epsilon(1e-9));
}

TEST_CASE("H2Problem from ProperData checks the pinned polynomial part")
{
  const PHDae sys = rcl_ladder(LadderSpec::random(2, 3));
  const ProperData pd = proper_data(sys);
  const Theta th = init_theta(2, 1, 1, InitStrategy::IdentityDissipative, 1);
  CHECK_THROWS_AS(H2Problem(pd, th), ImproperError);
  const Theta pinned = pin_polynomial_part(th, pd.poly.P0, pd.poly.P1, PinMode::H2);
  const H2Problem p(pd, pinned);
  CHECK(std::isfinite(h2_error_sq(p, pinned)));
}

TEST_CASE("minimize_h2: scalar recovery and pinned entries untouched")
{
  const Theta start = scalar_rom(std::sqrt(2.0), 1.0);
  H2Problem p(first_order(), start);
  int bad = 0;
  p.on_iterate = [&](const Theta &th) { bad += validate(assemble_rom(th).to_phdae()).pass ? 0 : 1; };
  const H2Result res = minimize_h2(p);
  CHECK(res.error <= 1e-6);
  CHECK(res.error_initial == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-10));
  CHECK(bad == 0);
  for (std::size_t k = 1; k < res.trace.size(); ++k)
  {
    CHECK(res.trace[k].objective <= res.trace[k - 1].objective);
  }
  std::ostringstream csv;
  res.write_trace_csv(csv);
  CHECK(csv.str().rfind("iter,objective,grad_norm,h2_error\n", 0) == 0);

  // Pinned improper ROM: frozen entries keep their values.
  const PHDae sys = rcl_ladder(LadderSpec::random(2, 3));
  const ProperData pd = proper_data(sys);
  const Theta pinned = pin_polynomial_part(init_theta(2, 1, 1, InitStrategy::IdentityDissipative, 1),
                                           pd.poly.P0, pd.poly.P1, PinMode::H2);
  H2Options opts;
  opts.max_iterations = 50;
  const H2Result r2 = minimize_h2(H2Problem(pd, pinned, opts));
  for (std::size_t k = 0; k < pinned.frozen.size(); ++k)
  {
    if (pinned.frozen[k])
    {
      CHECK(r2.theta.values(static_cast<Eigen::Index>(k)) == pinned.values(static_cast<Eigen::Index>(k)));
    }
  }
  CHECK(r2.error <= r2.error_initial);
  const RomSystem rom = assemble_rom(r2.theta);
  CHECK(((rom.S - rom.N) - pd.poly.P0).norm() <= 1e-12 * (1 + pd.poly.P0.norm()));
  CHECK((rom.improper() - pd.poly.P1).norm() <= 1e-12 * (1 + pd.poly.P1.norm()));
}
