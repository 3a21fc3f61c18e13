// Copyright The phmor Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: generate, validate, analyze, reduce, certify.
// Exit codes: 0 ok, 1 validation failure, 2 config or bundle error,
// 3 numerical refusal (improper norm, rank ambiguity, ...).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phmor/bench.hpp"
#include "phmor/io.hpp"
#include "phmor/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phmor;

namespace
{

constexpr int EXIT_VALIDATION = 1;
constexpr int EXIT_CONFIG = 2;
constexpr int EXIT_NUMERICAL = 3;

json number(double x)
{
  if (std::isfinite(x))
  {
    return x;
  }
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

void write_text(const fs::path &path, const std::string &text)
{
  std::ofstream out(path);
  out << text;
  if (!out)
  {
    throw Error("cannot write " + path.string());
  }
}

std::vector<long> parse_list(const std::string &text)
{
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    try
    {
      std::size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size())
      {
        throw std::invalid_argument(item);
      }
    }
    catch (const std::exception &)
    {
      throw StructureError("bad integer list '" + text + "'");
    }
  }
  return out;
}

// --- generate ----------------------------------------------------------------

struct GenerateArgs
{
  std::string kind = "rcl";
  int nbar = 2;
  std::string dims = "0,2,0,0";
  long m = 1;
  long r = 4, ell = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs &a)
{
  ModelBundle bundle;
  json meta;
  meta["kind"] = a.kind;
  meta["seed"] = a.seed;
  std::optional<Theta> truth;
  if (a.kind == "rcl")
  {
    bundle.sys = rcl_ladder(LadderSpec::random(a.nbar, a.seed));
    bundle.name = "rcl-ladder-" + std::to_string(a.nbar);
    meta["nbar"] = a.nbar;
  }
  else if (a.kind == "staircase")
  {
    const auto d = parse_list(a.dims);
    if (d.size() != 4)
    {
      throw StructureError("--dims needs four comma-separated integers n1,n2,n3,n4");
    }
    StaircaseSpec spec;
    spec.dims = {d[0], d[1], d[2], d[3]};
    spec.m = a.m;
    spec.seed = a.seed;
    bundle.sys = random_staircase(spec);
    bundle.name = "staircase-" + a.dims;
    meta["dims"] = d;
    meta["index"] = index_of(spec.dims);
  }
  else if (a.kind == "theta")
  {
    ThetaFom tf = random_fom_from_theta(a.r, a.m, a.ell, a.seed);
    bundle.sys = tf.sys;
    bundle.name = "theta-fom";
    meta["r"] = a.r;
    meta["ell"] = a.ell;
    truth = tf.theta;
  }
  else
  {
    throw StructureError("unknown --kind '" + a.kind + "' (rcl, staircase, theta)");
  }
  bundle.metadata = meta;
  save_bundle(bundle, a.out);
  if (truth)
  {
    save_theta(*truth, fs::path(a.out) / "theta_true.json");
  }
  std::cout << "wrote " << a.out << " (n = " << bundle.sys.n() << ", m = " << bundle.sys.m()
            << ")\n";
  return 0;
}

// --- validate ----------------------------------------------------------------

int cmd_validate(const std::string &path, bool regularity, bool as_json)
{
  const PHDae sys = load_model(path);
  ValidateOptions opts;
  opts.check_regularity = regularity;
  const ValidationReport rep = validate(sys, Tolerances{}, opts);
  if (as_json)
  {
    json j;
    j["pass"] = rep.pass;
    for (const auto &it : rep.items)
    {
      j["checks"][it.name] = {{"residual", it.residual}, {"tolerance", it.tolerance}, {"pass", it.pass}};
    }
    j["min_eig_E"] = rep.min_eig_E;
    j["min_eig_W"] = rep.min_eig_W;
    std::cout << j.dump(2) << "\n";
  }
  else
  {
    std::cout << rep.to_string();
  }
  return rep.pass ? 0 : EXIT_VALIDATION;
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs
{
  std::string bundle, out = "analysis";
  bool sigma = false, norms = false, polypart = false;
  std::string method = "crosscheck";
  double wmin = 1e-3, wmax = 1e4;
  std::size_t points = 200;
};

int cmd_analyze(const AnalyzeArgs &a)
{
  const PHDae sys = load_model(a.bundle);
  fs::create_directories(a.out);
  json summary;
  summary["n"] = sys.n();
  summary["m"] = sys.m();
  const bool all = !a.sigma && !a.norms && !a.polypart;
  const StaircaseSystem st = to_staircase(sys);
  summary["dims"] = {st.dims.n1, st.dims.n2, st.dims.n3, st.dims.n4};
  summary["index"] = index_of(st);
  if (a.polypart || all)
  {
    PolyMethod method = PolyMethod::CrossCheck;
    if (a.method == "staircase")
    {
      method = PolyMethod::Staircase;
    }
    else if (a.method == "limit")
    {
      method = PolyMethod::Limit;
    }
    else if (a.method != "crosscheck")
    {
      throw StructureError("unknown --method '" + a.method + "' (staircase, limit, crosscheck)");
    }
    const PolynomialPart pp = polynomial_part(sys, method);
    write_matrix_market(fs::path(a.out) / "P0.mtx", pp.P0);
    write_matrix_market(fs::path(a.out) / "P1.mtx", pp.P1);
    summary["P0"] = matrix_to_json(pp.P0);
    summary["P1"] = matrix_to_json(pp.P1);
    summary["P1_asymmetry"] = pp.asymmetry;
    summary["improper"] = pp.P1.norm() > 0;
  }
  if (a.norms || all)
  {
    const ProperData pd = proper_data(sys);
    StateSpace sp = pd.ss;
    sp.D.setZero();
    const HinfResult hn = hinf_norm(pd.ss);
    summary["h2_norm_strictly_proper"] = h2_norm(sp);
    summary["hinf_norm_proper"] = hn.value;
    summary["hinf_omega_peak"] = number(hn.omega_peak);
  }
  if (a.sigma || all)
  {
    const TfSamples s = sigma_samples(sys, FrequencyGrid::logspace(a.wmin, a.wmax, a.points));
    std::ofstream csv(fs::path(a.out) / "sigma.csv");
    s.write_csv(csv);
  }
  std::ofstream(fs::path(a.out) / "summary.json") << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// --- reduce ------------------------------------------------------------------

struct ReduceArgs
{
  std::string bundle, out = "rom";
  std::string method = "hinf";
  long order = 2;
  std::string ell = "auto";
  std::string seeds = "1";
  std::string init = "random";
  bool no_pin = false;
  int max_iter = 0, max_outer = 0, warm_start = 1000;
  double time_limit = 0, target = 0;
  unsigned threads = 0;
};

int cmd_reduce(const ReduceArgs &a)
{
  const PHDae sys = load_model(a.bundle);
  RunConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.r = a.order;
  cfg.ell = a.ell == "auto" ? -1 : parse_list(a.ell).at(0);
  cfg.init = parse_init_strategy(a.init);
  cfg.seeds.clear();
  for (long s : parse_list(a.seeds))
  {
    cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  cfg.pin = !a.no_pin;
  cfg.threads = a.threads;
  if (a.max_iter > 0)
  {
    cfg.hinf.max_total_iterations = a.max_iter;
    cfg.h2.max_iterations = a.max_iter;
  }
  if (a.max_outer > 0)
  {
    cfg.hinf.max_outer = a.max_outer;
  }
  cfg.warm_start_iterations = a.warm_start;
  cfg.hinf.time_limit = cfg.h2.time_limit = a.time_limit;
  cfg.hinf.target = cfg.h2.target = a.target;

  const FomModel fom(sys, cfg.tol);
  const ReduceResult res = run_reduce(fom, cfg);
  const SeedRun &best = res.best_run();
  const RomSystem rom = assemble_rom(best.theta);

  const fs::path out(a.out);
  fs::create_directories(out);
  json meta;
  meta["method"] = to_string(cfg.method);
  meta["r"] = rom.r;
  meta["ell"] = rom.ell;
  meta["source"] = fs::path(a.bundle).filename().string();
  save_bundle({"rom", rom.to_phdae(), meta}, out / "rom");
  save_theta(best.theta, out / "theta.json");
  write_text(out / "trace.csv", best.trace_csv);

  json summary;
  summary["method"] = to_string(cfg.method);
  summary["order"] = rom.r;
  summary["ell"] = rom.ell;
  summary["pinned"] = cfg.pin;
  summary["best_seed"] = best.seed;
  summary["certified_error"] = number(best.error);
  summary["initial_certified_error"] = number(best.error_initial);
  summary["budget"] = best.budget;
  if (!best.note.empty())
  {
    summary["note"] = best.note;
  }
  for (const auto &run : res.runs)
  {
    summary["runs"].push_back({{"seed", run.seed},
                               {"certified_error", number(run.error)},
                               {"initial_certified_error", number(run.error_initial)},
                               {"budget", run.budget}});
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// --- certify -----------------------------------------------------------------

int cmd_certify(const std::string &fom_path, const std::string &rom_path, const std::string &norm)
{
  if (norm != "auto" && norm != "hinf" && norm != "h2" && norm != "both")
  {
    throw StructureError("unknown --norm '" + norm + "' (auto, hinf, h2, both)");
  }
  const ProperData fom = proper_data(load_model(fom_path));
  const ProperData rom = proper_data(load_model(rom_path));
  const bool want_hinf = norm != "h2";
  bool want_h2 = norm == "h2" || norm == "both";
  if (norm == "auto")
  {
    want_h2 = p0_mismatch(fom.poly, rom.poly) <= POLY_MATCH_TOL &&
              p1_mismatch(fom.poly, rom.poly) <= POLY_MATCH_TOL;
  }
  const CertifyReport rep = run_certify(fom, rom, want_hinf, want_h2);
  json j;
  j["p0_mismatch"] = rep.p0_mismatch;
  j["p1_mismatch"] = rep.p1_mismatch;
  bool refused = false;
  if (want_hinf)
  {
    if (rep.hinf)
    {
      j["hinf_error"] = rep.hinf->value;
      j["hinf_omega_peak"] = number(rep.hinf->omega_peak);
    }
    else
    {
      j["hinf_refused"] = rep.hinf_refusal;
      refused = true;
    }
  }
  if (want_h2)
  {
    if (rep.h2)
    {
      j["h2_error"] = *rep.h2;
    }
    else
    {
      j["h2_refused"] = rep.h2_refusal;
      refused = true;
    }
  }
  std::cout << j.dump(2) << "\n";
  if (refused)
  {
    std::cerr << "certify: refused, " << (rep.hinf_refusal.empty() ? rep.h2_refusal : rep.hinf_refusal)
              << "\n";
  }
  return refused ? EXIT_NUMERICAL : 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"phmor: structure-preserving reduction of port-Hamiltonian descriptor systems"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML config file; subcommand options go in a [subcommand] section");

  GenerateArgs gen;
  auto *g = app.add_subcommand("generate", "Write a benchmark model bundle");
  g->add_option("--kind", gen.kind, "rcl, staircase or theta")->capture_default_str();
  g->add_option("--nbar", gen.nbar, "Loops of the RCL ladder (n = 3 nbar + 2)")->capture_default_str();
  g->add_option("--dims", gen.dims, "Staircase dims n1,n2,n3,n4 (n1 = n4)")->capture_default_str();
  g->add_option("--m", gen.m, "Ports")->capture_default_str();
  g->add_option("--r", gen.r, "Proper order (kind theta)")->capture_default_str();
  g->add_option("--ell", gen.ell, "Improper rank (kind theta)")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output bundle directory")->required();

  std::string val_path;
  bool val_regular = false, val_json = false;
  auto *v = app.add_subcommand("validate", "Check the pH structure of a bundle");
  v->add_option("bundle", val_path)->required();
  v->add_flag("--regularity", val_regular, "Also test regularity of the pencil");
  v->add_flag("--json", val_json, "Print the report as JSON");

  AnalyzeArgs an;
  auto *z = app.add_subcommand("analyze", "Sigma samples, norms and polynomial part");
  z->add_option("bundle", an.bundle)->required();
  z->add_flag("--sigma", an.sigma, "Write sigma.csv");
  z->add_flag("--norms", an.norms, "H2 norm of the strictly proper part, H-infinity norm of the proper part");
  z->add_flag("--polypart", an.polypart, "Write P0.mtx and P1.mtx");
  z->add_option("--method", an.method, "staircase, limit or crosscheck")->capture_default_str();
  z->add_option("--wmin", an.wmin)->capture_default_str();
  z->add_option("--wmax", an.wmax)->capture_default_str();
  z->add_option("--points", an.points)->capture_default_str();
  z->add_option("--out", an.out, "Output directory")->capture_default_str();

  ReduceArgs rd;
  auto *r = app.add_subcommand("reduce", "Optimize a reduced pH-DAE");
  r->add_option("bundle", rd.bundle)->required();
  r->add_option("--method", rd.method, "hinf or h2")->capture_default_str();
  r->add_option("--order", rd.order, "Proper order r")->capture_default_str();
  r->add_option("--ell", rd.ell, "Improper rank, or auto = rank(P1)")->capture_default_str();
  r->add_option("--seeds", rd.seeds, "Comma-separated seeds, run in parallel")->capture_default_str();
  r->add_option("--init", rd.init, "identity-dissipative or random")->capture_default_str();
  r->add_flag("--no-pin", rd.no_pin, "Do not match the polynomial part (diagnostics only)");
  r->add_option("--max-iter", rd.max_iter, "Total optimizer iterations per seed");
  r->add_option("--max-outer", rd.max_outer, "Gamma updates per seed (hinf)");
  r->add_option("--warm-start", rd.warm_start, "H2 iterations before the hinf loop, 0 = none")
      ->capture_default_str();
  r->add_option("--time-limit", rd.time_limit, "Seconds per seed, 0 = none")->capture_default_str();
  r->add_option("--target", rd.target, "Stop once the error is at most this")->capture_default_str();
  r->add_option("--threads", rd.threads, "Worker threads (default PHMOR_THREADS or all cores)");
  r->add_option("--out", rd.out, "Output directory")->capture_default_str();

  std::string cf_fom, cf_rom, cf_norm = "auto";
  auto *c = app.add_subcommand("certify", "Certified error norms between two bundles");
  c->add_option("fom", cf_fom)->required();
  c->add_option("rom", cf_rom)->required();
  c->add_option("--norm", cf_norm, "auto, hinf, h2 or both")->capture_default_str();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : EXIT_CONFIG;
  }

  try
  {
    if (g->parsed()) return cmd_generate(gen);
    if (v->parsed()) return cmd_validate(val_path, val_regular, val_json);
    if (z->parsed()) return cmd_analyze(an);
    if (r->parsed()) return cmd_reduce(rd);
    if (c->parsed()) return cmd_certify(cf_fom, cf_rom, cf_norm);
  }
  catch (const BundleError &e)
  {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return EXIT_CONFIG;
  }
  catch (const StructureError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_CONFIG;
  }
  catch (const NumericalError &e)
  {
    std::cerr << "numerical refusal: " << e.what() << "\n";
    return EXIT_NUMERICAL;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_CONFIG;
  }
  return 0;
}
