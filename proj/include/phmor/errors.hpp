// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_ERRORS_HPP
#define PHMOR_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace phmor
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Inconsistent matrix shapes or malformed parameter vectors.
class StructureError : public Error
{
public:
  using Error::Error;
};

// Base class for refusals that depend on the numbers, not the shapes.
class NumericalError : public Error
{
public:
  using Error::Error;
};

class SingularError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

class NotHurwitzError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

// The requested norm is infinite because the (error) transfer function has a
// nonzero polynomial part of too high a degree.
class ImproperError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

// A rank decision fell inside the ambiguity band around the threshold.
class RankAmbiguityError : public NumericalError
{
public:
  RankAmbiguityError(const std::string &what, std::vector<double> spectrum)
    : NumericalError(what), spectrum_(std::move(spectrum))
  {
  }

  // Normalized singular values (or eigenvalues) that were being classified.
  const std::vector<double> &spectrum() const { return spectrum_; }

private:
  std::vector<double> spectrum_;
};

}  // namespace phmor

#endif  // PHMOR_ERRORS_HPP
