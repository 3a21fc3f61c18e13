// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "phmor/bench.hpp"
#include "phmor/io.hpp"

using namespace phmor;
namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string &name)
{
  const fs::path dir = fs::temp_directory_path() / ("phmor_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

BundleError::Kind load_error(const fs::path &dir)
{
  try
  {
    load_bundle(dir);
  }
  catch (const BundleError &e)
  {
    return e.kind();
  }
  FAIL("expected BundleError");
  return BundleError::Kind::Malformed;
}

void write_text(const fs::path &p, const std::string &text)
{
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("matrix market: dense round trip is bit exact")
{
  std::mt19937_64 rng(1);
  const Matrix M = random_normal(4, 3, rng) * 1e-7;
  const fs::path dir = scratch("mm");
  write_matrix_market(dir / "M.mtx", M);
  CHECK((read_matrix_market(dir / "M.mtx") - M).norm() == 0.0);
  write_matrix_market(dir / "E.mtx", Matrix(0, 0));
  CHECK(read_matrix_market(dir / "E.mtx").size() == 0);
}

TEST_CASE("matrix market: coordinate formats")
{
  const fs::path dir = scratch("coord");
  write_text(dir / "g.mtx", "%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 1 3.5\n2 1 -1\n");
  const Matrix g = read_matrix_market(dir / "g.mtx");
  CHECK(g(0, 0) == 3.5);
  CHECK(g(1, 0) == -1);
  CHECK(g(0, 1) == 0);
  write_text(dir / "s.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 2\n");
  const Matrix s = read_matrix_market(dir / "s.mtx");
  CHECK(s(0, 1) == 2);
  CHECK(s(1, 0) == 2);
  write_text(dir / "k.mtx", "%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 4\n");
  const Matrix k = read_matrix_market(dir / "k.mtx");
  CHECK(k(1, 0) == 4);
  CHECK(k(0, 1) == -4);
  write_text(dir / "bad.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n2\n");
  CHECK_THROWS_AS(read_matrix_market(dir / "bad.mtx"), BundleError);
  CHECK_THROWS_AS(read_matrix_market(dir / "none.mtx"), BundleError);
}

TEST_CASE("bundle: round trip preserves every matrix and the metadata")
{
  ModelBundle b;
  b.name = "ladder";
  b.sys = rcl_ladder(LadderSpec::random(3, 2));
  b.metadata["nbar"] = 3;
  const fs::path dir = scratch("bundle");
  save_bundle(b, dir);
  const ModelBundle c = load_bundle(dir);
  CHECK(c.name == "ladder");
  CHECK(c.metadata["nbar"] == 3);
  CHECK((c.sys.E - b.sys.E).norm() == 0.0);
  CHECK((c.sys.J - b.sys.J).norm() == 0.0);
  CHECK((c.sys.R - b.sys.R).norm() == 0.0);
  CHECK((c.sys.G - b.sys.G).norm() == 0.0);
  CHECK((c.sys.P - b.sys.P).norm() == 0.0);
  CHECK((c.sys.S - b.sys.S).norm() == 0.0);
  CHECK((c.sys.N - b.sys.N).norm() == 0.0);
  CHECK((load_model(dir).E - b.sys.E).norm() == 0.0);
}

TEST_CASE("bundle: error kinds")
{
  const PHDae sys = rcl_ladder(LadderSpec::random(1, 2));
  {
    const fs::path dir = scratch("missing_manifest");
    CHECK(load_error(dir) == BundleError::Kind::MissingFile);
  }
  {
    const fs::path dir = scratch("missing_matrix");
    save_model(sys, dir);
    fs::remove(dir / "R.mtx");
    CHECK(load_error(dir) == BundleError::Kind::MissingFile);
  }
  {
    const fs::path dir = scratch("dims");
    save_model(sys, dir);
    write_matrix_market(dir / "R.mtx", Matrix::Zero(2, 2));
    CHECK(load_error(dir) == BundleError::Kind::DimensionMismatch);
  }
  {
    const fs::path dir = scratch("version");
    save_model(sys, dir);
    std::ifstream in(dir / "manifest.json");
    nlohmann::json j = nlohmann::json::parse(in);
    in.close();
    j["version"] = "99";
    write_text(dir / "manifest.json", j.dump());
    CHECK(load_error(dir) == BundleError::Kind::VersionMismatch);
  }
  {
    const fs::path dir = scratch("malformed");
    save_model(sys, dir);
    write_text(dir / "manifest.json", "{not json");
    CHECK(load_error(dir) == BundleError::Kind::Malformed);
  }
  CHECK(std::string(to_string(BundleError::Kind::DimensionMismatch)) == "dimension-mismatch");
}

TEST_CASE("theta json round trip keeps values and the frozen mask")
{
  std::mt19937_64 rng(4);
  Theta th = Theta::zeros(3, 2, 1);
  th.values = random_normal(th.values.size(), 1, rng);
  th.freeze_segment(Segment::L);
  const fs::path dir = scratch("theta");
  save_theta(th, dir / "theta.json");
  const Theta t2 = load_theta(dir / "theta.json");
  CHECK(t2.r == 3);
  CHECK(t2.m == 2);
  CHECK(t2.ell == 1);
  CHECK((t2.values - th.values).norm() == 0.0);
  CHECK(t2.frozen == th.frozen);
  nlohmann::json j = theta_to_json(th);
  j["values"].erase(0);
  CHECK_THROWS_AS(theta_from_json(j), BundleError);
  const nlohmann::json mj = matrix_to_json((Matrix(2, 2) << 1, 2, 3, 4).finished());
  CHECK(mj[0][1] == 2.0);
}
