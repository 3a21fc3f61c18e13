// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "phmor/bench.hpp"
#include "phmor/linalg.hpp"
#include "phmor/param.hpp"

using namespace phmor;

namespace
{

PHDae scalar_system(double R)
{
  PHDae s;
  s.E = Matrix::Identity(1, 1);
  s.J = Matrix::Zero(1, 1);
  s.R = Matrix::Constant(1, 1, R);
  s.G = Matrix::Ones(1, 1);
  s.P = Matrix::Zero(1, 1);
  s.S = Matrix::Zero(1, 1);
  s.N = Matrix::Zero(1, 1);
  return s;
}

}  // namespace

TEST_CASE("validate: scalar dissipative system passes with zero residuals")
{
  const ValidationReport rep = validate(scalar_system(1.0));
  CHECK(rep.pass);
  for (const auto &item : rep.items)
  {
    CHECK(item.residual == 0.0);
  }
}

TEST_CASE("validate: negative resistance fails with lambda_min(W) = -1")
{
  const ValidationReport rep = validate(scalar_system(-1.0));
  CHECK_FALSE(rep.pass);
  CHECK(rep.min_eig_W == doctest::Approx(-1.0));
  CHECK(rep.residual("psd_W") == doctest::Approx(1.0));
  CHECK(rep.residual("skew_J") == 0.0);
}

TEST_CASE("validate: shape mismatch is a structural error, not a failed report")
{
  PHDae s = scalar_system(1.0);
  s.G = Matrix::Ones(2, 1);
  CHECK_THROWS_AS(validate(s), StructureError);
}

TEST_CASE("validate: asymmetric E and non-skew J are reported")
{
  PHDae s;
  s.E = (Matrix(2, 2) << 1, 0.5, 0, 1).finished();
  s.J = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  s.R = Matrix::Identity(2, 2);
  s.G = Matrix::Ones(2, 1);
  s.P = Matrix::Zero(2, 1);
  s.S = Matrix::Zero(1, 1);
  s.N = Matrix::Zero(1, 1);
  const ValidationReport rep = validate(s);
  CHECK_FALSE(rep.pass);
  CHECK(rep.residual("sym_E") == doctest::Approx(std::sqrt(0.5)));
  CHECK(rep.residual("skew_J") == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("validate: random parameter vectors always give pH systems")
{
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> rd(0, 6), md(1, 3), ld(0, 2);
  for (int trial = 0; trial < 200; ++trial)
  {
    Theta th = Theta::zeros(rd(rng), md(rng), ld(rng));
    th.values = random_normal(th.values.size(), 1, rng) * 3.0;
    const PHDae sys = assemble_rom(th).to_phdae();
    ValidateOptions opts;
    opts.check_regularity = true;
    REQUIRE(validate(sys, {}, opts).pass);
    // x^T R x >= 0 for random x.
    for (int k = 0; k < 5; ++k)
    {
      if (sys.n() == 0)
      {
        break;
      }
      const Vector x = random_normal(sys.n(), 1, rng);
      CHECK(x.dot(sys.R * x) >= -1e-10 * (1 + sys.R.norm()) * x.squaredNorm());
    }
  }
}

TEST_CASE("validate: regularity check flags a singular pencil")
{
  PHDae s;
  s.E = Matrix::Zero(2, 2);
  s.E(0, 0) = 1;
  s.J = Matrix::Zero(2, 2);
  s.R = Matrix::Zero(2, 2);
  s.G = Matrix::Ones(2, 1);
  s.P = Matrix::Zero(2, 1);
  s.S = Matrix::Zero(1, 1);
  s.N = Matrix::Zero(1, 1);
  ValidateOptions opts;
  opts.check_regularity = true;
  const ValidationReport rep = validate(s, {}, opts);
  CHECK_FALSE(rep.pass);
  CHECK(rep.residual("regular") > 0);
  CHECK(pencil_rcond(s) < IRREGULAR_RCOND);
}

TEST_CASE("tolerances must be nonnegative")
{
  Tolerances t;
  t.tol_rank = -1;
  CHECK_THROWS_AS(t.check(), StructureError);
}

TEST_CASE("lyapunov: scalar and diagonal cases")
{
  CHECK(lyapunov_solve(Matrix::Constant(1, 1, -1), Matrix::Constant(1, 1, 2))(0, 0) ==
        doctest::Approx(1.0));
  const Matrix X = lyapunov_solve(-Matrix::Identity(2, 2), Vector(Vector::LinSpaced(2, 2, 4)).asDiagonal());
  CHECK(X(0, 0) == doctest::Approx(1.0));
  CHECK(X(1, 1) == doctest::Approx(2.0));
  CHECK(std::abs(X(0, 1)) < 1e-14);
}

TEST_CASE("lyapunov: Kronecker oracle on random stable A, n = 8")
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial)
  {
    Matrix A, B, C;
    oracle::random_stable(8, 2, rng, A, B, C);
    const Matrix Q = B * B.transpose();
    SolveDiagnostics diag;
    const Matrix X = lyapunov_solve(A, Q, &diag);
    const Matrix Xk = oracle::kron_sylvester(A, A, Q);
    CHECK((X - Xk).norm() <= 1e-9 * Xk.norm());
    CHECK((A * X + X * A.transpose() + Q).norm() <= 1e-10 * Q.norm());
    CHECK((X - X.transpose()).norm() == 0.0);
    CHECK_FALSE(diag.ill_conditioned);
  }
}

TEST_CASE("lyapunov: unstable coefficient is refused")
{
  CHECK_THROWS_AS(lyapunov_solve(Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1)), NotHurwitzError);
  CHECK_THROWS_AS(lyapunov_solve(Matrix::Zero(2, 2), Matrix::Identity(2, 2)), NotHurwitzError);
}

TEST_CASE("sylvester: scalar cases")
{
  CHECK(sylvester_solve(Matrix::Constant(1, 1, -1), Matrix::Constant(1, 1, -1), Matrix::Constant(1, 1, 2))(0, 0) ==
        doctest::Approx(1.0));
  CHECK(sylvester_solve(Matrix::Constant(1, 1, -2), Matrix::Constant(1, 1, -3), Matrix::Constant(1, 1, 5))(0, 0) ==
        doctest::Approx(1.0));
}

TEST_CASE("sylvester: Kronecker oracle on random pairs with n r <= 64")
{
  std::mt19937_64 rng(5);
  const int shapes[][2] = {{6, 3}, {8, 8}, {1, 7}, {5, 1}, {4, 4}};
  for (const auto &sh : shapes)
  {
    Matrix A, B, C, A2, B2, C2;
    oracle::random_stable(sh[0], 1, rng, A, B, C);
    oracle::random_stable(sh[1], 1, rng, A2, B2, C2);
    const Matrix Cc = random_normal(sh[0], sh[1], rng);
    SolveDiagnostics diag;
    const Matrix Y = sylvester_solve(A, A2, Cc, &diag);
    const Matrix Yk = oracle::kron_sylvester(A, A2, Cc);
    CHECK((Y - Yk).norm() <= 1e-9 * Yk.norm());
    CHECK(diag.relative_residual <= 1e-10);
  }
}

TEST_CASE("sylvester: eigenvalue collision is an error")
{
  // A = 1, B = -1: A + B has a zero eigenvalue.
  CHECK_THROWS_AS(sylvester_solve(Matrix::Ones(1, 1), -Matrix::Ones(1, 1), Matrix::Ones(1, 1)),
                  SingularError);
}

TEST_CASE("state space evaluation")
{
  StateSpace ss{Matrix::Constant(1, 1, -1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1)};
  CHECK(std::abs(ss.eval(Complex(0, 0))(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(ss.eval(Complex(0, 1))(0, 0) - 1.0 / Complex(1, 1)) < 1e-15);
}
