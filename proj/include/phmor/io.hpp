// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHMOR_IO_HPP
#define PHMOR_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "phmor/core.hpp"
#include "phmor/param.hpp"

namespace phmor
{

class BundleError : public Error
{
public:
  enum class Kind
  {
    MissingFile,
    DimensionMismatch,
    VersionMismatch,
    Malformed,
  };

  BundleError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

const char *to_string(BundleError::Kind kind);

constexpr const char *BUNDLE_FORMAT = "phdae-bundle";
constexpr const char *BUNDLE_VERSION = "1";

// Dense "matrix array real general" files, column-major, %.17g. The reader
// also accepts "coordinate real general|symmetric|skew-symmetric".
void write_matrix_market(const std::filesystem::path &path, const Matrix &M);
Matrix read_matrix_market(const std::filesystem::path &path);

struct ModelBundle
{
  std::string name;
  PHDae sys;
  nlohmann::json metadata = nlohmann::json::object();
};

///
/// A bundle is a directory holding manifest.json and one Matrix Market file
/// per matrix:
///   {"format": "phdae-bundle", "version": "1", "name": ..., "n": ..., "m": ...,
///    "matrices": {"E": "E.mtx", ...}, "metadata": {...}}
///
void save_bundle(const ModelBundle &bundle, const std::filesystem::path &dir);
ModelBundle load_bundle(const std::filesystem::path &dir);

void save_model(const PHDae &sys, const std::filesystem::path &dir, const std::string &name = "model");
PHDae load_model(const std::filesystem::path &dir);

// {"r": .., "m": .., "ell": .., "values": [...], "frozen": [...]}
nlohmann::json theta_to_json(const Theta &theta);
Theta theta_from_json(const nlohmann::json &j);
void save_theta(const Theta &theta, const std::filesystem::path &path);
Theta load_theta(const std::filesystem::path &path);

nlohmann::json matrix_to_json(const Matrix &M);  // row-major nested arrays

}  // namespace phmor

#endif  // PHMOR_IO_HPP
