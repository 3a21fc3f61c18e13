// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_FOM_MODEL_HPP
#define PHMOR_FOM_MODEL_HPP

#include <map>
#include <mutex>

#include "phmor/param.hpp"
#include "phmor/spectral.hpp"
#include "phmor/staircase.hpp"

namespace phmor
{

///
/// Proper part of a transfer function as an E = I realization (D = P0) plus
/// its polynomial coefficients. This is what the certification routines and
/// the H2 objective consume.
///
struct ProperData
{
  StateSpace ss;
  PolynomialPart poly;
};

ProperData proper_data(const PHDae &sys, const Tolerances &tol = {});
ProperData proper_data(const RomSystem &rom);

///
/// Full-order model with its staircase analysis done once. Samples of
/// H(i w) - P1 i w are computed from the full pencil and cached; the cache
/// is shared between threads (single writer at a time).
///
class FomModel
{
public:
  explicit FomModel(PHDae sys, const Tolerances &tol = {});

  const PHDae &sys() const { return sys_; }
  const StaircaseSystem &staircase() const { return st_; }
  const ProperData &proper() const { return proper_; }
  const PolynomialPart &poly() const { return proper_.poly; }
  Eigen::Index m() const { return sys_.m(); }

  // H(i w) - P1 i w.
  CMatrix proper_sample(double omega) const;
  std::size_t cache_size() const;

private:
  PHDae sys_;
  StaircaseSystem st_;
  ProperData proper_;
  mutable std::mutex mutex_;
  mutable std::map<double, CMatrix> cache_;
};

}  // namespace phmor

#endif  // PHMOR_FOM_MODEL_HPP
