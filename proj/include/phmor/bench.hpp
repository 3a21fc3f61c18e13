// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_BENCH_HPP
#define PHMOR_BENCH_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "phmor/param.hpp"
#include "phmor/staircase.hpp"

namespace phmor
{

///
/// RCL ladder driven by a voltage source u at node 1 with current output.
/// Loop k runs R_k from b_{k-1} (b_0 = node 1) to a_k, L_k from a_k to b_k
/// and C_k from b_k to ground; C_0 connects node 1 to ground. The source in
/// parallel with C_0 makes the transfer function improper (P1 = C_0).
///
struct LadderSpec
{
  int nbar = 1;
  std::vector<double> R, L, C;  // nbar values each
  double C0 = 1;

  // Element values uniform in (0, 1).
  static LadderSpec random(int nbar, std::uint64_t seed);
  void check() const;
};

// State (node potentials, inductor currents, source current), n = 3 nbar + 2.
PHDae rcl_ladder(const LadderSpec &spec);

struct StaircaseSpec
{
  StaircaseDims dims;
  Eigen::Index m = 1;
  std::uint64_t seed = 1;
  double e_min = 0.5, e_max = 2.0;      // spectrum of the leading E block
  double j41_min = 1.0, j41_max = 2.0;  // singular values of J41
  double r_shift = 0.1;                 // W = F F^T + r_shift I on the non-x4 part
  bool mix = true;                      // hide the structure by a random orthogonal T0

  void check() const;
};

// pH-DAE whose staircase form has exactly the requested dims.
PHDae random_staircase(const StaircaseSpec &spec);

struct ThetaFom
{
  PHDae sys;
  Theta theta;  // ground truth
};

// assemble_rom of an N(0, 1) parameter vector, as a full pH-DAE of dimension r + 2 ell.
ThetaFom random_fom_from_theta(Eigen::Index r, Eigen::Index m, Eigen::Index ell,
                               std::uint64_t seed);

Matrix random_orthogonal(Eigen::Index n, std::mt19937_64 &rng);
Matrix random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng);

}  // namespace phmor

#endif  // PHMOR_BENCH_HPP
