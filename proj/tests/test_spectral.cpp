// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <sstream>

#include <doctest.h>

#include "oracles.hpp"
#include "phmor/bench.hpp"
#include "phmor/fom_model.hpp"
#include "phmor/spectral.hpp"

using namespace phmor;

namespace
{

PHDae scalar_fom()
{
  PHDae s;
  s.E = Matrix::Identity(1, 1);
  s.J = Matrix::Zero(1, 1);
  s.R = Matrix::Ones(1, 1);
  s.G = Matrix::Ones(1, 1);
  s.P = Matrix::Zero(1, 1);
  s.S = Matrix::Zero(1, 1);
  s.N = Matrix::Zero(1, 1);
  return s;
}

StateSpace siso(double a, double b, double c)
{
  return {Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, c), Matrix::Zero(1, 1)};
}

// Trapezoidal quadrature of (1/pi) int_0^inf ||H(i w)||_F^2 dw on a log grid.
double h2_quadrature(const StateSpace &ss)
{
  const int N = 200000;
  const double a = -6, b = 6;
  double sum = 0;
  double prev_w = 0, prev_f = (ss.eval(Complex(0, 0))).squaredNorm();
  for (int k = 0; k < N; ++k)
  {
    const double w = std::pow(10.0, a + (b - a) * k / (N - 1));
    const double f = ss.eval(Complex(0, w)).squaredNorm();
    sum += 0.5 * (f + prev_f) * (w - prev_w);
    prev_w = w;
    prev_f = f;
  }
  return std::sqrt(sum / M_PI);
}

}  // namespace

TEST_CASE("eval_tf: scalar system and real-rational symmetry")
{
  const PHDae s = scalar_fom();
  for (double w : {0.0, 0.5, 3.0})
  {
    CHECK(std::abs(eval_tf(s, Complex(0, w))(0, 0) - 1.0 / Complex(1, w)) < 1e-15);
  }
  StaircaseSpec spec;
  spec.dims = {1, 2, 1, 1};
  spec.m = 2;
  const PHDae sys = random_staircase(spec);
  const Complex z(0.3, 1.7);
  CHECK((eval_tf(sys, z).conjugate() - eval_tf(sys, std::conj(z))).norm() < 1e-12);
}

TEST_CASE("eval_tf: RCL ladder is dominated by P1 s at high frequency")
{
  const PHDae sys = rcl_ladder(LadderSpec::random(2, 3));
  const PolynomialPart pp = polynomial_part(sys);
  const CMatrix H = eval_tf(sys, Complex(0, 1e6));
  CHECK(std::abs(H(0, 0).imag() / 1e6 - pp.P1(0, 0)) < 1e-6 * pp.P1(0, 0));
}

TEST_CASE("polynomial_part: index <= 1 systems have P1 = 0")
{
  for (const StaircaseDims d : {StaircaseDims{0, 4, 0, 0}, StaircaseDims{0, 3, 2, 0}})
  {
    StaircaseSpec spec;
    spec.dims = d;
    spec.m = 2;
    const PHDae sys = random_staircase(spec);
    const PolynomialPart pp = polynomial_part(sys, PolyMethod::CrossCheck);
    CHECK(pp.P1.norm() < 1e-12);
    // P0 equals H at infinity.
    const CMatrix Hinf = eval_tf(sys, Complex(0, 1e9));
    CHECK((Hinf.real() - pp.P0).norm() < 1e-6 * (1 + pp.P0.norm()));
  }
}

TEST_CASE("polynomial_part: ROM with L = 2 gives P1 = 4, P0 = S - N")
{
  Theta th = Theta::zeros(2, 1, 1);
  std::mt19937_64 rng(3);
  th.values = random_normal(th.values.size(), 1, rng);
  th.set_segment(Segment::L, Vector::Constant(1, 2.0));
  const RomSystem rom = assemble_rom(th);
  for (PolyMethod m : {PolyMethod::Staircase, PolyMethod::Limit, PolyMethod::CrossCheck})
  {
    const PolynomialPart pp = polynomial_part(rom.to_phdae(), m);
    CHECK(pp.P1(0, 0) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(pp.P0(0, 0) == doctest::Approx((rom.S - rom.N)(0, 0)).epsilon(1e-8));
  }
}

TEST_CASE("polynomial_part: RCL ladder is improper, methods agree, residual decays")
{
  const PHDae sys = rcl_ladder(LadderSpec::random(2, 1));
  const PolynomialPart st = polynomial_part(sys, PolyMethod::Staircase);
  const PolynomialPart lim = polynomial_part(sys, PolyMethod::Limit);
  CHECK(st.P1(0, 0) > 0);
  CHECK(polynomial_part_distance(st, lim) <= 1e-6);
  CHECK(st.asymmetry < 1e-12);
  const auto res = polynomial_residuals(sys, {1e6, 1e7, 1e8});
  CHECK(res[1] < res[0]);
  CHECK(res[2] < res[1]);
  // Decay like 1/w: w * residual roughly constant.
  CHECK(res[1] * 1e7 == doctest::Approx(res[0] * 1e6).epsilon(0.05));
}

TEST_CASE("polynomial_part: disagreement surfaces both results")
{
  const MethodDisagreementError e("x", PolynomialPart{Matrix::Ones(1, 1), Matrix::Zero(1, 1), 0},
                                  PolynomialPart{Matrix::Zero(1, 1), Matrix::Zero(1, 1), 0});
  CHECK(e.staircase().P0(0, 0) == 1.0);
  CHECK(e.limit().P0(0, 0) == 0.0);
}

TEST_CASE("h2_norm: analytic scalar values")
{
  CHECK(h2_norm(siso(-1, 1, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(h2_norm(siso(-4, 2, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  StateSpace d = siso(-1, 1, 1);
  d.D(0, 0) = 1;
  CHECK_THROWS_AS(h2_norm(d), ImproperError);
  CHECK_THROWS_AS(h2_norm(siso(1, 1, 1)), NotHurwitzError);
}

TEST_CASE("h2_norm: quadrature oracle on a random stable system, n = 6")
{
  std::mt19937_64 rng(6);
  StateSpace ss;
  oracle::random_stable(6, 2, rng, ss.A, ss.B, ss.C);
  ss.D = Matrix::Zero(2, 2);
  const double q = h2_quadrature(ss);
  CHECK(std::abs(h2_norm(ss) - q) <= 1e-3 * q);
}

TEST_CASE("h2_norm is additive over block-diagonal channels")
{
  StateSpace a = siso(-1, 1, 1), b = siso(-3, 2, 0.5);
  StateSpace ab;
  ab.A = Matrix::Zero(2, 2);
  ab.A(0, 0) = -1;
  ab.A(1, 1) = -3;
  ab.B = Matrix::Zero(2, 2);
  ab.B(0, 0) = 1;
  ab.B(1, 1) = 2;
  ab.C = Matrix::Zero(2, 2);
  ab.C(0, 0) = 1;
  ab.C(1, 1) = 0.5;
  ab.D = Matrix::Zero(2, 2);
  const double na = h2_norm(a), nb = h2_norm(b);
  CHECK(h2_norm(ab) * h2_norm(ab) == doctest::Approx(na * na + nb * nb).epsilon(1e-12));
}

TEST_CASE("hinf_norm: scalar values")
{
  const HinfResult a = hinf_norm(siso(-1, 1, 1));
  CHECK(a.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(a.omega_peak == 0.0);
  // s / (s^2 + 0.1 s + 1): peak 10 at w = 1.
  StateSpace ss;
  ss.A = (Matrix(2, 2) << 0, 1, -1, -0.1).finished();
  ss.B = (Matrix(2, 1) << 0, 1).finished();
  ss.C = (Matrix(1, 2) << 0, 1).finished();
  ss.D = Matrix::Zero(1, 1);
  const HinfResult b = hinf_norm(ss);
  CHECK(std::abs(b.value - 10.0) <= 1e-4);
  CHECK(b.omega_peak == doctest::Approx(1.0).epsilon(1e-3));
  // Feedthrough dominating: peak at infinity.
  StateSpace c = siso(-1, 1, 0.1);
  c.D(0, 0) = 2;
  const HinfResult hc = hinf_norm(c);
  CHECK(hc.value == doctest::Approx(2.1).epsilon(1e-10));
}

TEST_CASE("hinf_norm: dense-grid oracle on random MIMO systems, n = 8, m = 2")
{
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 5; ++trial)
  {
    StateSpace ss;
    oracle::random_stable(8, 2, rng, ss.A, ss.B, ss.C);
    ss.D = Matrix::Zero(2, 2);
    const HinfResult h = hinf_norm(ss);
    const double grid = oracle::dense_grid_max(
        [&](double w) { return oracle::sigma(oracle::ss_tf(ss.A, ss.B, ss.C, ss.D, Complex(0, w))); }, 1e-4, 1e4,
        100000);
    CHECK(std::abs(h.value - grid) <= 1e-6 * grid);
  }
}

TEST_CASE("hinf_norm of an improper pH-DAE is refused")
{
  const PHDae sys = rcl_ladder(LadderSpec::random(2, 1));
  CHECK_THROWS_AS(hinf_norm(sys), ImproperError);
  // Proper scalar DAE: fine.
  CHECK(hinf_norm(scalar_fom()).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("level crossings bracket the peak")
{
  StateSpace ss;
  ss.A = (Matrix(2, 2) << 0, 1, -1, -0.1).finished();
  ss.B = (Matrix(2, 1) << 0, 1).finished();
  ss.C = (Matrix(1, 2) << 0, 1).finished();
  ss.D = Matrix::Zero(1, 1);
  const auto cross = level_crossings(ss, 5.0);
  REQUIRE(cross.size() == 2);
  CHECK(cross[0] < 1.0);
  CHECK(cross[1] > 1.0);
  for (double w : cross)
  {
    CHECK(sigma_max(ss.eval(Complex(0, w))) == doctest::Approx(5.0).epsilon(1e-8));
  }
  CHECK(level_crossings(ss, 11.0).empty());
}

TEST_CASE("sigma_samples and CSV export")
{
  const PHDae s = scalar_fom();
  const TfSamples t = sigma_samples(s, FrequencyGrid::from({0.0, 1.0}));
  REQUIRE(t.sigma.size() == 2);
  CHECK(t.sigma[0] == doctest::Approx(1.0));
  CHECK(t.sigma[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(sigma_samples(s, FrequencyGrid::from({})).sigma.empty());
  std::ostringstream csv;
  t.write_csv(csv);
  CHECK(csv.str().rfind("omega,sigma_max,re_1_1,im_1_1\n", 0) == 0);
  // Improper system: sigma(10 w) / sigma(w) -> 10.
  const PHDae rcl = rcl_ladder(LadderSpec::random(2, 5));
  const TfSamples hi = sigma_samples(rcl, FrequencyGrid::from({1e5, 1e6}));
  CHECK(hi.sigma[1] / hi.sigma[0] == doctest::Approx(10.0).epsilon(1e-3));
  // Error pair.
  const TransferFunction H = [&](Complex z) { return eval_tf(s, z); };
  const TransferFunction Z = [](Complex) { return CMatrix::Zero(1, 1); };
  CHECK(sigma_samples(H, Z, FrequencyGrid::from({0.0})).sigma[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(FrequencyGrid::from({-1.0}), StructureError);
  const FrequencyGrid g = FrequencyGrid::logspace(1e-2, 1e2, 5);
  CHECK(g.omega.size() == 5);
  CHECK(g.omega[2] == doctest::Approx(1.0));
}

TEST_CASE("sigma_samples reports the offending frequency")
{
  Theta th = Theta::zeros(1, 1, 0);
  th.set_segment(Segment::G, Vector::Ones(1));
  const PHDae sys = assemble_rom(th).to_phdae();  // pole at s = 0
  CHECK_THROWS_AS(sigma_samples(sys, FrequencyGrid::from({0.0})), NumericalError);
}

TEST_CASE("positive_real_check")
{
  std::mt19937_64 rng(19);
  const FrequencyGrid grid = FrequencyGrid::logspace(1e-3, 1e3, 60);
  for (int k = 0; k < 10; ++k)
  {
    Theta th = Theta::zeros(3, 2, 1);
    th.values = random_normal(th.values.size(), 1, rng);
    const RomSystem rom = assemble_rom(th);
    const auto rep = positive_real_check([&](Complex s) { return rom.transfer(s); }, grid);
    CHECK(rep.pass);
  }
  PHDae bad = scalar_fom();
  bad.R(0, 0) = -1;
  bad.E(0, 0) = 1;
  const auto rep = positive_real_check([&](Complex s) { return eval_tf(bad, s); },
                                       FrequencyGrid::from({0.0}));
  CHECK_FALSE(rep.pass);
  // H(s) = s.
  const auto pure = positive_real_check([](Complex s) { return CMatrix::Constant(1, 1, s); }, grid);
  CHECK(pure.pass);
}

TEST_CASE("splitting consistency: Hp + Hp^H = H + H^H")
{
  const PHDae sys = rcl_ladder(LadderSpec::random(3, 2));
  const FomModel fom(sys);
  const FrequencyGrid grid = FrequencyGrid::logspace(1e-2, 1e3, 100);
  double worst = 0;
  for (double w : grid.omega)
  {
    const CMatrix H = eval_tf(sys, Complex(0, w));
    const CMatrix Hp = fom.proper().ss.eval(Complex(0, w));
    worst = std::max(worst, ((Hp + Hp.adjoint()) - (H + H.adjoint())).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-10);
}
