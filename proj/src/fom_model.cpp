// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/fom_model.hpp"

namespace phmor
{

ProperData proper_data(const PHDae &sys, const Tolerances &tol)
{
  const StaircaseSystem st = to_staircase(sys, tol);
  const ProperSplit split = split_proper(st);
  ProperData out;
  out.ss = to_state_space(split.proper);
  out.poly.P0 = out.ss.D;
  out.poly.asymmetry = (split.P1 - split.P1.transpose()).norm();
  out.poly.P1 = sym_part(split.P1);
  return out;
}

ProperData proper_data(const RomSystem &rom)
{
  ProperData out;
  out.ss = rom.proper();
  out.poly.P0 = out.ss.D;
  out.poly.P1 = rom.improper();
  return out;
}

FomModel::FomModel(PHDae sys, const Tolerances &tol) : sys_(std::move(sys))
{
  sys_.check_dimensions();
  st_ = to_staircase(sys_, tol);
  const ProperSplit split = split_proper(st_);
  proper_.ss = to_state_space(split.proper);
  proper_.poly.P0 = proper_.ss.D;
  proper_.poly.asymmetry = (split.P1 - split.P1.transpose()).norm();
  proper_.poly.P1 = sym_part(split.P1);
}

CMatrix FomModel::proper_sample(double omega) const
{
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(omega);
    if (it != cache_.end())
    {
      return it->second;
    }
  }
  const Complex s(0, omega);
  CMatrix H = eval_phdae(sys_, s) - s * proper_.poly.P1.cast<Complex>();
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(omega, H);
  return H;
}

std::size_t FomModel::cache_size() const
{
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

}  // namespace phmor
