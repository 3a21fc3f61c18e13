// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "phmor/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace phmor
{

namespace fs = std::filesystem;

namespace
{

const char *const MATRIX_NAMES[] = {"E", "J", "R", "G", "P", "S", "N"};

Matrix *matrix_slot(PHDae &sys, const std::string &name)
{
  if (name == "E") return &sys.E;
  if (name == "J") return &sys.J;
  if (name == "R") return &sys.R;
  if (name == "G") return &sys.G;
  if (name == "P") return &sys.P;
  if (name == "S") return &sys.S;
  if (name == "N") return &sys.N;
  return nullptr;
}

std::string lower(std::string s)
{
  for (char &c : s)
  {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

[[noreturn]] void malformed(const fs::path &path, const std::string &why)
{
  throw BundleError(BundleError::Kind::Malformed, path.string() + ": " + why);
}

}  // namespace

const char *to_string(BundleError::Kind kind)
{
  switch (kind)
  {
    case BundleError::Kind::MissingFile: return "missing-file";
    case BundleError::Kind::DimensionMismatch: return "dimension-mismatch";
    case BundleError::Kind::VersionMismatch: return "version-mismatch";
    case BundleError::Kind::Malformed: return "malformed";
  }
  return "unknown";
}

void write_matrix_market(const fs::path &path, const Matrix &M)
{
  std::FILE *f = std::fopen(path.string().c_str(), "w");
  if (!f)
  {
    throw Error("cannot write " + path.string());
  }
  std::fprintf(f, "%%%%MatrixMarket matrix array real general\n");
  std::fprintf(f, "%ld %ld\n", static_cast<long>(M.rows()), static_cast<long>(M.cols()));
  for (Eigen::Index j = 0; j < M.cols(); ++j)
  {
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
      std::fprintf(f, "%.17g\n", M(i, j));
    }
  }
  if (std::fclose(f) != 0)
  {
    throw Error("error while writing " + path.string());
  }
}

Matrix read_matrix_market(const fs::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw BundleError(BundleError::Kind::MissingFile, "cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line))
  {
    malformed(path, "empty file");
  }
  std::istringstream header(lower(line));
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
  {
    malformed(path, "missing MatrixMarket banner");
  }
  if (field != "real" && field != "integer" && field != "double")
  {
    malformed(path, "only real matrices are supported");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
  {
    malformed(path, "unsupported symmetry '" + symmetry + "'");
  }
  while (std::getline(in, line))
  {
    if (!line.empty() && line[0] != '%')
    {
      break;
    }
  }
  std::istringstream size_line(line);
  long rows = -1, cols = -1, nnz = -1;
  size_line >> rows >> cols;
  if (layout == "coordinate")
  {
    size_line >> nnz;
  }
  if (!size_line || rows < 0 || cols < 0)
  {
    malformed(path, "bad size line");
  }
  Matrix M = Matrix::Zero(rows, cols);
  const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
  if (layout == "array")
  {
    if (symmetry != "general")
    {
      malformed(path, "symmetric array layout is not supported");
    }
    for (long j = 0; j < cols; ++j)
    {
      for (long i = 0; i < rows; ++i)
      {
        if (!(in >> M(i, j)))
        {
          malformed(path, "too few entries");
        }
      }
    }
  }
  else if (layout == "coordinate")
  {
    for (long k = 0; k < nnz; ++k)
    {
      long i = 0, j = 0;
      double v = 0;
      if (!(in >> i >> j >> v) || i < 1 || j < 1 || i > rows || j > cols)
      {
        malformed(path, "bad coordinate entry");
      }
      M(i - 1, j - 1) += v;
      if (symmetry != "general" && i != j)
      {
        M(j - 1, i - 1) += mirror * v;
      }
    }
  }
  else
  {
    malformed(path, "unknown layout '" + layout + "'");
  }
  double extra = 0;
  if (in >> extra)
  {
    malformed(path, "trailing entries");
  }
  return M;
}

void save_bundle(const ModelBundle &bundle, const fs::path &dir)
{
  bundle.sys.check_dimensions();
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = BUNDLE_FORMAT;
  manifest["version"] = BUNDLE_VERSION;
  manifest["name"] = bundle.name;
  manifest["n"] = bundle.sys.n();
  manifest["m"] = bundle.sys.m();
  PHDae sys = bundle.sys;
  for (const char *name : MATRIX_NAMES)
  {
    const std::string file = std::string(name) + ".mtx";
    manifest["matrices"][name] = file;
    write_matrix_market(dir / file, *matrix_slot(sys, name));
  }
  manifest["metadata"] = bundle.metadata;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
  if (!out)
  {
    throw Error("cannot write " + (dir / "manifest.json").string());
  }
}

ModelBundle load_bundle(const fs::path &dir)
{
  const fs::path mpath = dir / "manifest.json";
  std::ifstream in(mpath);
  if (!in)
  {
    throw BundleError(BundleError::Kind::MissingFile, "cannot open " + mpath.string());
  }
  nlohmann::json manifest;
  try
  {
    in >> manifest;
  }
  catch (const nlohmann::json::exception &e)
  {
    malformed(mpath, std::string("invalid JSON: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("version") || !manifest["version"].is_string() ||
      manifest["version"].get<std::string>() != BUNDLE_VERSION)
  {
    throw BundleError(BundleError::Kind::VersionMismatch,
                      mpath.string() + ": expected format version \"" + BUNDLE_VERSION + "\"");
  }
  if (!manifest.contains("format") || manifest["format"] != BUNDLE_FORMAT)
  {
    throw BundleError(BundleError::Kind::VersionMismatch,
                      mpath.string() + ": not a " + BUNDLE_FORMAT + " manifest");
  }
  ModelBundle bundle;
  long n = 0, m = 0;
  try
  {
    bundle.name = manifest.value("name", std::string());
    n = manifest.at("n").get<long>();
    m = manifest.at("m").get<long>();
    if (manifest.contains("metadata"))
    {
      bundle.metadata = manifest["metadata"];
    }
  }
  catch (const nlohmann::json::exception &e)
  {
    malformed(mpath, std::string("bad manifest field: ") + e.what());
  }
  for (const char *name : MATRIX_NAMES)
  {
    std::string file = std::string(name) + ".mtx";
    if (manifest.contains("matrices") && manifest["matrices"].contains(name))
    {
      file = manifest["matrices"][name].get<std::string>();
    }
    const fs::path p = dir / file;
    if (!fs::exists(p))
    {
      throw BundleError(BundleError::Kind::MissingFile, "missing matrix file " + p.string());
    }
    *matrix_slot(bundle.sys, name) = read_matrix_market(p);
  }
  const PHDae &s = bundle.sys;
  auto expect = [&](const char *name, const Matrix &M, long rows, long cols)
  {
    if (M.rows() != rows || M.cols() != cols)
    {
      std::ostringstream msg;
      msg << dir.string() << ": " << name << " is " << M.rows() << "x" << M.cols() << ", manifest says "
          << rows << "x" << cols;
      throw BundleError(BundleError::Kind::DimensionMismatch, msg.str());
    }
  };
  expect("E", s.E, n, n);
  expect("J", s.J, n, n);
  expect("R", s.R, n, n);
  expect("G", s.G, n, m);
  expect("P", s.P, n, m);
  expect("S", s.S, m, m);
  expect("N", s.N, m, m);
  return bundle;
}

void save_model(const PHDae &sys, const fs::path &dir, const std::string &name)
{
  save_bundle({name, sys, nlohmann::json::object()}, dir);
}

PHDae load_model(const fs::path &dir) { return load_bundle(dir).sys; }

nlohmann::json theta_to_json(const Theta &theta)
{
  nlohmann::json j;
  j["r"] = theta.r;
  j["m"] = theta.m;
  j["ell"] = theta.ell;
  j["values"] = std::vector<double>(theta.values.data(), theta.values.data() + theta.values.size());
  j["frozen"] = theta.frozen;
  return j;
}

Theta theta_from_json(const nlohmann::json &j)
{
  Theta theta;
  try
  {
    theta = Theta::zeros(j.at("r").get<Eigen::Index>(), j.at("m").get<Eigen::Index>(),
                         j.at("ell").get<Eigen::Index>());
    const auto values = j.at("values").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != theta.values.size())
    {
      throw BundleError(BundleError::Kind::DimensionMismatch,
                        "theta: value count does not match (r, m, ell)");
    }
    theta.values = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (j.contains("frozen"))
    {
      theta.frozen = j["frozen"].get<std::vector<bool>>();
    }
  }
  catch (const nlohmann::json::exception &e)
  {
    throw BundleError(BundleError::Kind::Malformed, std::string("theta: ") + e.what());
  }
  theta.check();
  return theta;
}

void save_theta(const Theta &theta, const fs::path &path)
{
  std::ofstream out(path);
  out << theta_to_json(theta).dump(2) << "\n";
  if (!out)
  {
    throw Error("cannot write " + path.string());
  }
}

Theta load_theta(const fs::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw BundleError(BundleError::Kind::MissingFile, "cannot open " + path.string());
  }
  nlohmann::json j;
  try
  {
    in >> j;
  }
  catch (const nlohmann::json::exception &e)
  {
    throw BundleError(BundleError::Kind::Malformed, path.string() + ": " + e.what());
  }
  return theta_from_json(j);
}

nlohmann::json matrix_to_json(const Matrix &M)
{
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
  {
    std::vector<double> row(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index k = 0; k < M.cols(); ++k)
    {
      row[static_cast<std::size_t>(k)] = M(i, k);
    }
    j.push_back(row);
  }
  return j;
}

}  // namespace phmor
