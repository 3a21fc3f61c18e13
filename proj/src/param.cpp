// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/param.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace phmor
{

namespace
{

constexpr double INIT_EPSILON = 1e-2;

Eigen::Index tri(Eigen::Index n) { return n * (n + 1) / 2; }

void require_length(const Vector &v, Eigen::Index expected, const char *what)
{
  if (v.size() != expected)
  {
    std::ostringstream msg;
    msg << what << ": vector has length " << v.size() << ", expected " << expected;
    throw StructureError(msg.str());
  }
}

Matrix reshape_rows(const Vector &v, Eigen::Index rows, Eigen::Index cols)
{
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
  {
    for (Eigen::Index j = 0; j < cols; ++j)
    {
      M(i, j) = v(i * cols + j);
    }
  }
  return M;
}

Vector flatten_rows(const Matrix &M)
{
  Vector v(M.size());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < M.cols(); ++j)
    {
      v(i * M.cols() + j) = M(i, j);
    }
  }
  return v;
}

// Gradient with respect to vtsu entries of a matrix V^T - V.
Vector skew_chain(const Matrix &g, Eigen::Index n)
{
  Vector out(n * (n - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = i + 1; j < n; ++j)
    {
      out(k++) = g(j, i) - g(i, j);
    }
  }
  return out;
}

}  // namespace

Matrix vtu(const Vector &v, Eigen::Index n)
{
  require_length(v, tri(n), "vtu");
  Matrix M = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = i; j < n; ++j)
    {
      M(i, j) = v(k++);
    }
  }
  return M;
}

Matrix vtsu(const Vector &v, Eigen::Index n)
{
  require_length(v, n * (n - 1) / 2, "vtsu");
  Matrix M = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = i + 1; j < n; ++j)
    {
      M(i, j) = v(k++);
    }
  }
  return M;
}

Matrix vtf(const Vector &v, Eigen::Index cols)
{
  if (cols <= 0)
  {
    if (v.size() != 0)
    {
      throw StructureError("vtf: nonempty vector with zero columns");
    }
    return Matrix(0, 0);
  }
  if (v.size() % cols != 0)
  {
    throw StructureError("vtf: vector length is not divisible by the column count");
  }
  return reshape_rows(v, v.size() / cols, cols);
}

// --- Theta -----------------------------------------------------------------

Eigen::Index Theta::segment_size(Segment seg, Eigen::Index r, Eigen::Index m, Eigen::Index ell)
{
  switch (seg)
  {
    case Segment::J: return r * (r - 1) / 2;
    case Segment::W: return tri(r + m);
    case Segment::G: return r * m;
    case Segment::N: return m * (m - 1) / 2;
    case Segment::L: return m * ell;
  }
  return 0;
}

Eigen::Index Theta::total_size(Eigen::Index r, Eigen::Index m, Eigen::Index ell)
{
  Eigen::Index total = 0;
  for (auto seg : {Segment::J, Segment::W, Segment::G, Segment::N, Segment::L})
  {
    total += segment_size(seg, r, m, ell);
  }
  return total;
}

Theta Theta::zeros(Eigen::Index r, Eigen::Index m, Eigen::Index ell)
{
  if (r < 0 || m < 1 || ell < 0)
  {
    throw StructureError("Theta: need r >= 0, m >= 1, ell >= 0");
  }
  Theta t;
  t.r = r;
  t.m = m;
  t.ell = ell;
  const auto size = total_size(r, m, ell);
  t.values = Vector::Zero(size);
  t.frozen.assign(static_cast<std::size_t>(size), false);
  return t;
}

Eigen::Index Theta::segment_offset(Segment seg) const
{
  Eigen::Index off = 0;
  for (auto s : {Segment::J, Segment::W, Segment::G, Segment::N, Segment::L})
  {
    if (s == seg)
    {
      return off;
    }
    off += segment_size(s);
  }
  return off;
}

Vector Theta::segment(Segment seg) const
{
  return values.segment(segment_offset(seg), segment_size(seg));
}

void Theta::set_segment(Segment seg, const Vector &v)
{
  require_length(v, segment_size(seg), "Theta::set_segment");
  values.segment(segment_offset(seg), segment_size(seg)) = v;
}

bool Theta::segment_frozen(Segment seg) const
{
  const auto off = segment_offset(seg);
  for (Eigen::Index k = 0; k < segment_size(seg); ++k)
  {
    if (!frozen[static_cast<std::size_t>(off + k)])
    {
      return false;
    }
  }
  return true;
}

void Theta::freeze_segment(Segment seg, bool value)
{
  const auto off = segment_offset(seg);
  for (Eigen::Index k = 0; k < segment_size(seg); ++k)
  {
    frozen[static_cast<std::size_t>(off + k)] = value;
  }
}

Eigen::Index Theta::w_index(Eigen::Index i, Eigen::Index j) const
{
  const auto q = r + m;
  return segment_offset(Segment::W) + i * q - i * (i - 1) / 2 + (j - i);
}

std::vector<Eigen::Index> Theta::free_indices() const
{
  std::vector<Eigen::Index> idx;
  for (std::size_t k = 0; k < frozen.size(); ++k)
  {
    if (!frozen[k])
    {
      idx.push_back(static_cast<Eigen::Index>(k));
    }
  }
  return idx;
}

Vector Theta::free_values() const
{
  const auto idx = free_indices();
  Vector v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
  {
    v(static_cast<Eigen::Index>(k)) = values(idx[k]);
  }
  return v;
}

Theta Theta::with_free_values(const Vector &free) const
{
  const auto idx = free_indices();
  require_length(free, static_cast<Eigen::Index>(idx.size()), "Theta::with_free_values");
  Theta out = *this;
  for (std::size_t k = 0; k < idx.size(); ++k)
  {
    out.values(idx[k]) = free(static_cast<Eigen::Index>(k));
  }
  return out;
}

void Theta::check() const
{
  if (r < 0 || m < 1 || ell < 0)
  {
    throw StructureError("Theta: need r >= 0, m >= 1, ell >= 0");
  }
  require_length(values, total_size(r, m, ell), "Theta");
  if (frozen.size() != static_cast<std::size_t>(values.size()))
  {
    throw StructureError("Theta: frozen mask length differs from the parameter count");
  }
}

// --- assembly --------------------------------------------------------------

RomSystem assemble_rom(const Theta &theta)
{
  theta.check();
  const auto r = theta.r, m = theta.m, ell = theta.ell;
  RomSystem rom;
  rom.r = r;
  rom.m = m;
  rom.ell = ell;
  const Matrix VJ = vtsu(theta.segment(Segment::J), r);
  rom.Jh = VJ.transpose() - VJ;
  rom.U = vtu(theta.segment(Segment::W), r + m);
  rom.W = rom.U * rom.U.transpose();
  rom.Rh = rom.W.topLeftCorner(r, r);
  rom.Ph = rom.W.topRightCorner(r, m);
  rom.S = rom.W.bottomRightCorner(m, m);
  rom.Gh = reshape_rows(theta.segment(Segment::G), r, m);
  const Matrix VN = vtsu(theta.segment(Segment::N), m);
  rom.N = VN.transpose() - VN;
  rom.L = reshape_rows(theta.segment(Segment::L), m, ell);
  return rom;
}

PHDae RomSystem::to_phdae() const
{
  const auto n = r + 2 * ell;
  PHDae sys;
  sys.E = Matrix::Zero(n, n);
  sys.E.topLeftCorner(r + ell, r + ell).setIdentity();
  sys.J = Matrix::Zero(n, n);
  sys.J.topLeftCorner(r, r) = Jh;
  sys.J.block(r, r + ell, ell, ell) = -Matrix::Identity(ell, ell);
  sys.J.block(r + ell, r, ell, ell) = Matrix::Identity(ell, ell);
  sys.R = Matrix::Zero(n, n);
  sys.R.topLeftCorner(r, r) = Rh;
  sys.G = Matrix::Zero(n, m);
  sys.G.topRows(r) = Gh;
  sys.G.bottomRows(ell) = L.transpose();
  sys.P = Matrix::Zero(n, m);
  sys.P.topRows(r) = Ph;
  sys.S = S;
  sys.N = N;
  return sys;
}

StateSpace RomSystem::proper() const
{
  return {Jh - Rh, Gh - Ph, (Gh + Ph).transpose(), S - N};
}

CMatrix RomSystem::transfer(Complex s) const
{
  CMatrix H = (S - N).cast<Complex>() + s * improper().cast<Complex>();
  if (r > 0)
  {
    CMatrix resolvent = s * CMatrix::Identity(r, r) - (Jh - Rh).cast<Complex>();
    Eigen::PartialPivLU<CMatrix> lu(resolvent);
    if (!(lu.rcond() > 1e-14))
    {
      throw SingularError("rom_transfer: s is (numerically) an eigenvalue of Jh - Rh");
    }
    H += (Gh + Ph).transpose().cast<Complex>() * lu.solve((Gh - Ph).cast<Complex>());
  }
  return H;
}

CMatrix rom_transfer(const Theta &theta, Complex s) { return assemble_rom(theta).transfer(s); }

CMatrix eval_phdae(const PHDae &sys, Complex s)
{
  sys.check_dimensions();
  CMatrix H = (sys.S - sys.N).cast<Complex>();
  if (sys.n() == 0)
  {
    return H;
  }
  CMatrix pencil = s * sys.E.cast<Complex>() - (sys.J - sys.R).cast<Complex>();
  Eigen::PartialPivLU<CMatrix> lu(pencil);
  if (!(lu.rcond() > 1e-15))
  {
    std::ostringstream msg;
    msg << "eval_tf: the pencil sE - (J - R) is singular at s = " << s;
    throw SingularError(msg.str());
  }
  H += (sys.G + sys.P).transpose().cast<Complex>() * lu.solve((sys.G - sys.P).cast<Complex>());
  return H;
}

// --- factors and pinning ---------------------------------------------------

Matrix upper_factor(const Matrix &S)
{
  const auto n = S.rows();
  if (n == 0)
  {
    return Matrix(0, 0);
  }
  const Matrix flip = Matrix::Identity(n, n).rowwise().reverse();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(S));
  Matrix U;
  if (eig.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))
  {
    // Reverse Cholesky: flip S = L L^T  =>  S = (flip L flip)(flip L flip)^T.
    Eigen::LLT<Matrix> llt(flip * sym_part(S) * flip);
    U = flip * Matrix(llt.matrixL()) * flip;
  }
  else
  {
    // Semidefinite: take any square factor F and reduce it with an RQ step.
    const Matrix F = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Eigen::HouseholderQR<Matrix> qr((flip * F).transpose());
    const Matrix Rq = qr.matrixQR().triangularView<Eigen::Upper>();
    U = flip * Rq.transpose() * flip;
  }
  for (Eigen::Index j = 0; j < n; ++j)
  {
    if (U(j, j) < 0)
    {
      U.col(j) = -U.col(j);
    }
  }
  return U;
}

Matrix low_rank_factor(const Matrix &P, double tol_rank)
{
  const auto m = P.rows();
  if (m == 0)
  {
    return Matrix(0, 0);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(P));
  const Vector lam = eig.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = m - 1; i >= 0; --i)
  {
    if (lmax > 0 && lam(i) > tol_rank * lmax)
    {
      keep.push_back(i);
    }
  }
  Matrix L(m, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
  {
    const auto i = keep[k];
    L.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(i) * std::sqrt(lam(i));
  }
  // Fix the sign so that the largest entry of each column is positive.
  for (Eigen::Index j = 0; j < L.cols(); ++j)
  {
    Eigen::Index imax;
    L.col(j).cwiseAbs().maxCoeff(&imax);
    if (L(imax, j) < 0)
    {
      L.col(j) = -L.col(j);
    }
  }
  return L;
}

Theta pin_polynomial_part(const Theta &theta, const Matrix &P0, const Matrix &P1, PinMode mode,
                          double tol_rank, double tol_psd)
{
  theta.check();
  const auto m = theta.m;
  if (P0.rows() != m || P0.cols() != m || P1.rows() != m || P1.cols() != m)
  {
    throw StructureError("pin_polynomial_part: P0 and P1 must be m x m");
  }
  const Matrix P1s = sym_part(P1);
  if ((P1 - P1.transpose()).norm() > 1e-8 * (1 + P1.norm())
      || min_sym_eigenvalue(P1s) < -tol_psd * (1 + P1.norm()))
  {
    throw NumericalError("pin_polynomial_part: P1 is not symmetric positive semidefinite");
  }
  const Matrix L = low_rank_factor(P1s, tol_rank);
  const auto ell = L.cols();

  // Carry the J, W, G, N segments over to the resized parameter vector.
  Theta out = Theta::zeros(theta.r, m, ell);
  for (auto seg : {Segment::J, Segment::W, Segment::G, Segment::N})
  {
    out.set_segment(seg, theta.segment(seg));
    const auto src = theta.segment_offset(seg), dst = out.segment_offset(seg);
    for (Eigen::Index k = 0; k < theta.segment_size(seg); ++k)
    {
      out.frozen[static_cast<std::size_t>(dst + k)] = theta.frozen[static_cast<std::size_t>(src + k)];
    }
  }
  out.set_segment(Segment::L, flatten_rows(L));
  out.freeze_segment(Segment::L);

  if (mode == PinMode::H2)
  {
    const Matrix S0 = sym_part(P0);
    if (min_sym_eigenvalue(S0) < -tol_psd * (1 + S0.norm()))
    {
      throw NumericalError("pin_polynomial_part: sym(P0) is not positive semidefinite");
    }
    out = seed_feedthrough(out, P0);
    const auto r = out.r;
    for (Eigen::Index i = r; i < r + m; ++i)
    {
      for (Eigen::Index j = i; j < r + m; ++j)
      {
        out.frozen[static_cast<std::size_t>(out.w_index(i, j))] = true;
      }
    }
    out.freeze_segment(Segment::N);
  }
  return out;
}

Theta seed_feedthrough(const Theta &theta, const Matrix &P0)
{
  theta.check();
  const auto r = theta.r, m = theta.m;
  Theta out = theta;
  const Matrix U22 = upper_factor(sym_part(P0));
  for (Eigen::Index i = 0; i < m; ++i)
  {
    for (Eigen::Index j = i; j < m; ++j)
    {
      out.values(out.w_index(r + i, r + j)) = U22(i, j);
    }
  }
  // N = V^T - V with V = vtsu(theta_N) and N = -skew(P0).
  const Matrix K = skew_part(P0);
  Vector vN(m * (m - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m; ++i)
  {
    for (Eigen::Index j = i + 1; j < m; ++j)
    {
      vN(k++) = K(i, j);
    }
  }
  out.set_segment(Segment::N, vN);
  return out;
}

// --- initialization --------------------------------------------------------

InitStrategy parse_init_strategy(const std::string &name)
{
  if (name == "identity-dissipative")
  {
    return InitStrategy::IdentityDissipative;
  }
  if (name == "random")
  {
    return InitStrategy::Random;
  }
  throw StructureError("init_theta: unknown strategy '" + name + "'");
}

Theta init_theta(Eigen::Index r, Eigen::Index m, Eigen::Index ell, InitStrategy strategy,
                 std::uint64_t seed)
{
  Theta t = Theta::zeros(r, m, ell);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (strategy)
  {
    case InitStrategy::IdentityDissipative:
    {
      const double root_eps = std::sqrt(INIT_EPSILON);
      for (Eigen::Index i = 0; i < r; ++i)
      {
        t.values(t.w_index(i, i)) = root_eps;
      }
      const double stddev = r > 0 ? 1.0 / std::sqrt(static_cast<double>(r)) : 0.0;
      const auto off = t.segment_offset(Segment::G);
      for (Eigen::Index k = 0; k < t.segment_size(Segment::G); ++k)
      {
        t.values(off + k) = stddev * normal(rng);
      }
      break;
    }
    case InitStrategy::Random:
      for (Eigen::Index k = 0; k < t.values.size(); ++k)
      {
        t.values(k) = 0.1 * normal(rng);
      }
      break;
  }
  return t;
}

// --- gradients -------------------------------------------------------------

RomGradient RomGradient::zeros(const RomSystem &rom)
{
  const auto r = rom.r, m = rom.m;
  return {Matrix::Zero(r, r), Matrix::Zero(r, r), Matrix::Zero(r, m), Matrix::Zero(r, m),
          Matrix::Zero(m, m), Matrix::Zero(m, m), Matrix::Zero(m, m)};
}

Vector chain_to_theta(const Theta &theta, const RomSystem &rom, const RomGradient &grad)
{
  const auto r = theta.r, m = theta.m, q = r + m;
  Vector out = Vector::Zero(theta.values.size());

  out.segment(theta.segment_offset(Segment::J), theta.segment_size(Segment::J)) =
      skew_chain(grad.Jh, r);

  // W = U U^T; the objective sees W through its blocks [[Rh, Ph], [., S]].
  Matrix GW = Matrix::Zero(q, q);
  GW.topLeftCorner(r, r) = grad.Rh;
  GW.topRightCorner(r, m) = grad.Ph;
  GW.bottomRightCorner(m, m) = grad.S;
  const Matrix gU = (GW + GW.transpose()) * rom.U;
  Vector gW(tri(q));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < q; ++i)
  {
    for (Eigen::Index j = i; j < q; ++j)
    {
      gW(k++) = gU(i, j);
    }
  }
  out.segment(theta.segment_offset(Segment::W), gW.size()) = gW;

  out.segment(theta.segment_offset(Segment::G), r * m) = flatten_rows(grad.Gh);
  out.segment(theta.segment_offset(Segment::N), theta.segment_size(Segment::N)) =
      skew_chain(grad.N, m);
  const Matrix gL = (grad.P1 + grad.P1.transpose()) * rom.L;
  out.segment(theta.segment_offset(Segment::L), gL.size()) = flatten_rows(gL);
  return out;
}

}  // namespace phmor
