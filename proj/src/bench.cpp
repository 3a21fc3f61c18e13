// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/bench.hpp"

#include <Eigen/QR>

namespace phmor
{

Matrix random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng)
{
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
  {
    for (Eigen::Index i = 0; i < rows; ++i)
    {
      M(i, j) = nd(rng);
    }
  }
  return M;
}

Matrix random_orthogonal(Eigen::Index n, std::mt19937_64 &rng)
{
  if (n == 0)
  {
    return Matrix(0, 0);
  }
  Eigen::HouseholderQR<Matrix> qr(random_normal(n, n, rng));
  Matrix Q = qr.householderQ();
  // Sign fix so Q is Haar distributed.
  const Matrix Rm = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k)
  {
    if (Rm(k, k) < 0)
    {
      Q.col(k) *= -1;
    }
  }
  return Q;
}

// --- RCL ladder ------------------------------------------------------------

LadderSpec LadderSpec::random(int nbar, std::uint64_t seed)
{
  if (nbar < 1)
  {
    throw StructureError("LadderSpec: nbar must be at least 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  auto draw = [&]
  {
    double x = 0;
    while (x == 0)
    {
      x = ud(rng);
    }
    return x;
  };
  LadderSpec s;
  s.nbar = nbar;
  s.C0 = draw();
  for (int k = 0; k < nbar; ++k)
  {
    s.R.push_back(draw());
    s.L.push_back(draw());
    s.C.push_back(draw());
  }
  return s;
}

void LadderSpec::check() const
{
  const auto n = static_cast<std::size_t>(nbar);
  if (nbar < 1 || R.size() != n || L.size() != n || C.size() != n)
  {
    throw StructureError("LadderSpec: need nbar >= 1 and nbar values for R, L and C");
  }
  auto positive = [](const std::vector<double> &v)
  {
    for (double x : v)
    {
      if (!(x > 0))
      {
        return false;
      }
    }
    return true;
  };
  if (!positive(R) || !positive(L) || !positive(C) || !(C0 > 0))
  {
    throw StructureError("LadderSpec: element values must be positive");
  }
}

PHDae rcl_ladder(const LadderSpec &spec)
{
  spec.check();
  const Eigen::Index nb = spec.nbar;
  const Eigen::Index nodes = 1 + 2 * nb;
  const Eigen::Index n = nodes + nb + 1;
  auto a = [](Eigen::Index k) { return 1 + 2 * k; };  // node a_{k+1}
  auto b = [](Eigen::Index k) { return 2 + 2 * k; };  // node b_{k+1}

  // Node-branch incidences, ground omitted.
  Matrix AC = Matrix::Zero(nodes, nb + 1), AR = Matrix::Zero(nodes, nb), AL = Matrix::Zero(nodes, nb);
  Vector Cv(nb + 1), Gv(nb), Lv(nb);
  AC(0, 0) = 1;
  Cv(0) = spec.C0;
  for (Eigen::Index k = 0; k < nb; ++k)
  {
    const auto kk = static_cast<std::size_t>(k);
    AR(k == 0 ? 0 : b(k - 1), k) = 1;
    AR(a(k), k) = -1;
    AL(a(k), k) = 1;
    AL(b(k), k) = -1;
    AC(b(k), k + 1) = 1;
    Cv(k + 1) = spec.C[kk];
    Gv(k) = 1.0 / spec.R[kk];
    Lv(k) = spec.L[kk];
  }
  Vector AV = Vector::Zero(nodes);
  AV(0) = 1;

  PHDae sys;
  sys.E = Matrix::Zero(n, n);
  sys.E.topLeftCorner(nodes, nodes) = AC * Cv.asDiagonal() * AC.transpose();
  sys.E.block(nodes, nodes, nb, nb) = Lv.asDiagonal();
  sys.J = Matrix::Zero(n, n);
  sys.J.block(0, nodes, nodes, nb) = -AL;
  sys.J.block(nodes, 0, nb, nodes) = AL.transpose();
  sys.J.block(0, n - 1, nodes, 1) = -AV;
  sys.J.block(n - 1, 0, 1, nodes) = AV.transpose();
  sys.R = Matrix::Zero(n, n);
  sys.R.topLeftCorner(nodes, nodes) = AR * Gv.asDiagonal() * AR.transpose();
  sys.G = Matrix::Zero(n, 1);
  sys.G(n - 1, 0) = -1;
  sys.P = Matrix::Zero(n, 1);
  sys.S = Matrix::Zero(1, 1);
  sys.N = Matrix::Zero(1, 1);
  return sys;
}

// --- random staircase systems ------------------------------------------------

void StaircaseSpec::check() const
{
  if (dims.n1 < 0 || dims.n2 < 0 || dims.n3 < 0 || dims.n4 < 0)
  {
    throw StructureError("StaircaseSpec: dimensions must be nonnegative");
  }
  if (dims.n1 != dims.n4)
  {
    throw StructureError("StaircaseSpec: n1 must equal n4");
  }
  if (m < 1)
  {
    throw StructureError("StaircaseSpec: need at least one port");
  }
  if (!(e_min > 0 && e_max >= e_min && j41_min > 0 && j41_max >= j41_min && r_shift > 0))
  {
    throw StructureError("StaircaseSpec: invalid conditioning ranges");
  }
}

PHDae random_staircase(const StaircaseSpec &spec)
{
  spec.check();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const auto &d = spec.dims;
  const Eigen::Index n = d.total(), m = spec.m;
  const Eigen::Index ne = d.n1 + d.n2, nw = d.n1 + d.n2 + d.n3;
  const Eigen::Index o4 = nw;

  PHDae sys;
  sys.E = Matrix::Zero(n, n);
  if (ne > 0)
  {
    const Matrix Q = random_orthogonal(ne, rng);
    Vector lam(ne);
    for (Eigen::Index k = 0; k < ne; ++k)
    {
      lam(k) = spec.e_min + (spec.e_max - spec.e_min) * ud(rng);
    }
    sys.E.topLeftCorner(ne, ne) = Q * lam.asDiagonal() * Q.transpose();
  }

  // Skew J on the leading nw block plus the J41 / J14 coupling.
  const Matrix K = random_normal(nw, nw, rng);
  sys.J = Matrix::Zero(n, n);
  sys.J.topLeftCorner(nw, nw) = K - K.transpose();
  if (d.n1 > 0)
  {
    const Matrix U = random_orthogonal(d.n4, rng), V = random_orthogonal(d.n1, rng);
    Vector sv(d.n1);
    for (Eigen::Index k = 0; k < d.n1; ++k)
    {
      sv(k) = spec.j41_min + (spec.j41_max - spec.j41_min) * ud(rng);
    }
    const Matrix J41 = U * sv.asDiagonal() * V.transpose();
    sys.J.block(o4, 0, d.n4, d.n1) = J41;
    sys.J.block(0, o4, d.n1, d.n4) = -J41.transpose();
  }

  // W = F F^T + shift I on (x1, x2, x3, u); x4 rows of R and P vanish.
  const Matrix F = random_normal(nw + m, nw + m, rng);
  const Matrix W = F * F.transpose() / static_cast<double>(nw + m) +
                   spec.r_shift * Matrix::Identity(nw + m, nw + m);
  sys.R = Matrix::Zero(n, n);
  sys.R.topLeftCorner(nw, nw) = W.topLeftCorner(nw, nw);
  sys.P = Matrix::Zero(n, m);
  sys.P.topRows(nw) = W.topRightCorner(nw, m);
  sys.S = W.bottomRightCorner(m, m);
  sys.G = random_normal(n, m, rng);
  const Matrix Nn = random_normal(m, m, rng);
  sys.N = Nn - Nn.transpose();

  if (spec.mix && n > 0)
  {
    // x_s = T0 x, so the source system is T0^T (.) T0.
    const Matrix T0 = random_orthogonal(n, rng);
    sys.E = T0.transpose() * sys.E * T0;
    sys.E = sym_part(sys.E);
    sys.J = T0.transpose() * sys.J * T0;
    sys.J = skew_part(sys.J);
    sys.R = T0.transpose() * sys.R * T0;
    sys.R = sym_part(sys.R);
    sys.G = T0.transpose() * sys.G;
    sys.P = T0.transpose() * sys.P;
  }
  return sys;
}

ThetaFom random_fom_from_theta(Eigen::Index r, Eigen::Index m, Eigen::Index ell,
                               std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  Theta theta = Theta::zeros(r, m, ell);
  theta.values = random_normal(theta.values.size(), 1, rng);
  return {assemble_rom(theta).to_phdae(), theta};
}

}  // namespace phmor
