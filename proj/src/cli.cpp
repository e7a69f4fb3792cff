#include "semshape/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "semshape/config.hpp"
#include "semshape/elliptic.hpp"
#include "semshape/objective.hpp"
#include "semshape/optimizer.hpp"
#include "semshape/radial.hpp"
#include "semshape/validation.hpp"
#include "semshape/version.hpp"

namespace semshape {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliState {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 12345;
  int modes = 0;   // 0 = take from config (default 20)
  int grid = 0;    // 0 = take from config
  bool quiet = false;

  Config config;      // loaded before dispatch when config_path is set
  std::string command;
};

void note(const CliState& st, const std::string& line) {
  if (!st.quiet) std::cout << line << "\n";
}

std::string artifact_path(const CliState& st, const std::string& ext) {
  const std::string name = st.command + "-" + st.config.hash_hex() + "." + ext;
  return (fs::path(st.out_dir) / name).string();
}

json base_json(const CliState& st) {
  json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = st.command;
  j["config_hash"] = st.config.hash_hex();
  j["seed"] = st.seed;
  return j;
}

void write_json_file(const CliState& st, const json& j) {
  const std::string path = artifact_path(st, "json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  note(st, "wrote " + path);
}

std::ofstream open_artifact(const CliState& st, const std::string& ext,
                            std::string* path_out = nullptr) {
  const std::string path = artifact_path(st, ext);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << std::setprecision(17);
  if (path_out) *path_out = path;
  return out;
}

// radial sub-config shared by the stability commands
struct RadialSetup {
  RadialGrid rg;
  double rho = 0.0;
  int modes = 20;
};

RadialSetup radial_from_config(const CliState& st) {
  RadialSetup rs;
  const double R = st.config.get_double("radial.R", 1.0);
  int n_r = st.config.get_int("radial.n_r", 4096);
  if (st.grid > 0) n_r = st.grid;
  rs.rg = make_radial_grid(R, n_r);
  rs.rho = st.config.get_double("rho", 0.0);
  rs.modes = st.modes > 0 ? st.modes : st.config.get_int("radial.modes", 20);
  return rs;
}

int cmd_solve(CliState& st) {
  const ProblemSetup ps = setup_from_config(st.config, st.grid);
  DensityField a;
  const std::string shape = st.config.get_string("solve.density", "ones");
  if (shape == "ones") {
    a = uniform_density(ps.grid, 1.0);
  } else if (shape == "disk") {
    a = disk_indicator(ps.grid, st.config.get_double("solve.disk_R", 0.5 * ps.grid.L));
  } else {
    throw std::invalid_argument("config: solve.density must be 'ones' or 'disk'");
  }

  PicardDiagnostics diag;
  const ScalarField u = solve_semilinear(ps.grid, a, ps.M, ps.rho, ps.f, ps.g, {}, &diag);
  write_csv(u, ps.grid, artifact_path(st, "csv"));
  note(st, "wrote " + artifact_path(st, "csv"));

  json j = base_json(st);
  j["iterations"] = diag.iterations;
  j["final_increment"] = diag.increments.empty() ? 0.0 : diag.increments.back();
  int cg_total = 0;
  for (int c : diag.cg_iterations) cg_total += c;
  j["cg_iterations_total"] = cg_total;
  j["sup_u"] = sup_norm(u);
  j["value"] = value_from_state(ps.grid, a, ps.M, u, ps.g);
  j["rho"] = ps.rho;
  j["M"] = ps.M;
  j["grid_n"] = ps.grid.n;
  write_json_file(st, j);
  return 0;
}

int cmd_optimize(CliState& st) {
  const ProblemSetup ps = setup_from_config(st.config, st.grid);

  OptimizeConfig oc;
  oc.grid = ps.grid;
  oc.m = ps.m;
  oc.rho = ps.rho;
  oc.f = ps.f;
  oc.g = ps.g;
  if (st.config.has("opt.M_schedule")) {
    oc.M_schedule = st.config.get_list("opt.M_schedule");
  } else {
    oc.M_schedule.clear();
    for (double M = 1e2; M < ps.M; M *= 10.0) oc.M_schedule.push_back(M);
    oc.M_schedule.push_back(ps.M);
  }
  oc.max_iter_per_stage = st.config.get_int("opt.max_iter", 500);
  oc.move_tol = st.config.get_double("opt.move_tol", 1e-6);

  const std::string init = st.config.get_string("opt.initial", "uniform");
  if (init == "uniform") {
    oc.initial = uniform_density(ps.grid, std::min(1.0, ps.m / ps.grid.area()));
  } else if (init == "disk") {
    const double fallback = std::sqrt(ps.m / 3.14159265358979323846);
    const double R = st.config.get_double("opt.disk_R", std::min(fallback, 0.95 * ps.grid.L));
    oc.initial = disk_indicator(ps.grid, R);
  } else {
    throw std::invalid_argument("config: opt.initial must be 'uniform' or 'disk'");
  }

  const OptimizeResult res = optimize(oc);
  write_csv(res.density, ps.grid, artifact_path(st, "csv"));
  note(st, "wrote " + artifact_path(st, "csv"));

  {
    std::string path;
    std::ofstream dat = open_artifact(st, "dat", &path);
    dat << "# stage M iteration value mass binariness step move_norm descent_slack\n";
    for (const IterationRecord& r : res.history)
      dat << r.stage << " " << r.M << " " << r.iteration << " " << r.value << " " << r.mass
          << " " << r.binariness << " " << r.step << " " << r.move_norm << " "
          << r.descent_slack << "\n";
    note(st, "wrote " + path);
  }

  json j = base_json(st);
  j["value"] = res.value;
  j["mass"] = mass(res.density, ps.grid);
  j["iterations"] = res.history.size();
  j["stage_binariness"] = res.stage_binariness;
  j["stalled"] = res.stalled;
  if (res.stalled) j["stall_reason"] = res.stall_reason;
  j["m"] = ps.m;
  j["rho"] = ps.rho;
  j["M_final"] = oc.M_schedule.back();
  write_json_file(st, j);
  return 0;
}

int cmd_stability(CliState& st) {
  // --grid overrides the radial resolution here; the 2-D grid is unused
  const ProblemSetup ps = setup_from_config(st.config, 0);
  const RadialSetup rsetup = radial_from_config(st);

  const RadialSolution rs =
      solve_radial_state_adjoint(rsetup.rg, rsetup.rho, ps.f, ps.g);
  const StabilityReport rep = stability_verdict(rs, ps.f, ps.g, rsetup.modes);

  {
    std::string path;
    std::ofstream csv = open_artifact(st, "csv", &path);
    csv << "k,omega,psi_dR,xi_dR,zeta_dR\n";
    for (int k = 1; k <= rep.K; ++k) {
      const size_t idx = static_cast<size_t>(k - 1);
      csv << k << "," << rep.omega[idx] << "," << rep.psi_dR[idx] << "," << rep.xi_dR[idx]
          << "," << rep.zeta_dR[idx] << "\n";
    }
    note(st, "wrote " + path);
  }
  {
    std::string path;
    std::ofstream dat = open_artifact(st, "dat", &path);
    dat << "# r state adjoint\n";
    for (size_t i = 0; i < rs.grid.r.size(); ++i)
      dat << rs.grid.r[i] << " " << rs.state[i] << " " << rs.adjoint[i] << "\n";
    note(st, "wrote " + path);
  }

  json j = base_json(st);
  j["verdict"] = to_string(rep.verdict);
  j["omega"] = rep.omega;
  j["omega_1"] = rep.omega.front();
  j["c1"] = rep.c1;
  j["mean_condition"] = rep.mean_condition;
  j["mean_lhs"] = rep.mean_lhs;
  j["mean_rhs"] = rep.mean_rhs;
  j["fit_slope"] = rep.fit_slope;
  j["tolerance"] = rep.tolerance;
  j["rho"] = rep.rho;
  j["R"] = rsetup.rg.R;
  j["boundary_slope"] = rs.state_dR;
  j["multiplier"] = rs.boundary_product;
  write_json_file(st, j);
  return 0;
}

int cmd_instability(CliState& st) {
  const ProblemSetup ps = setup_from_config(st.config, 0);
  const RadialSetup rsetup = radial_from_config(st);
  const std::vector<double> rhos =
      st.config.get_list("radial.rho_list", {1e-3, 3e-3, 1e-2});

  const InstabilityReport rep = instability_demo(ps.f, ps.g, rhos, rsetup.rg.n_r);

  {
    std::string path;
    std::ofstream csv = open_artifact(st, "csv", &path);
    csv << "rho,omega_1,slope,unstable,marginal\n";
    for (const InstabilityRow& row : rep.rows)
      csv << row.rho << "," << row.omega1 << "," << row.slope << "," << (row.unstable ? 1 : 0)
          << "," << (row.marginal ? 1 : 0) << "\n";
    note(st, "wrote " + path);
  }

  json j = base_json(st);
  j["sigma"] = rep.sigma;
  j["all_unstable"] = rep.all_unstable;
  json rows = json::array();
  for (const InstabilityRow& row : rep.rows) {
    json r;
    r["rho"] = row.rho;
    r["omega_1"] = row.omega1;
    r["slope"] = row.slope;
    r["unstable"] = row.unstable;
    r["marginal"] = row.marginal;
    rows.push_back(r);
  }
  j["rows"] = rows;
  j["destabilizing_mode"] = 1;
  write_json_file(st, j);
  return 0;
}

int cmd_validate(CliState& st) {
  const std::vector<CheckResult> results = run_validation_suite(std::cout, st.seed);
  int failed = 0;
  for (const CheckResult& r : results)
    if (!r.pass) ++failed;

  json j = base_json(st);
  json checks = json::array();
  for (const CheckResult& r : results) {
    json c;
    c["name"] = r.name;
    c["pass"] = r.pass;
    c["detail"] = r.detail;
    checks.push_back(c);
  }
  j["checks"] = checks;
  j["failed"] = failed;
  write_json_file(st, j);

  std::cout << (results.size() - failed) << "/" << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CliState st;

  CLI::App app{"semilinear shape-energy toolbox"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    CLI::Option* cfg = sub->add_option("--config", st.config_path, "problem config file");
    if (needs_config) cfg->required();
    sub->add_option("--out", st.out_dir, "output directory");
    sub->add_option("--seed", st.seed, "random seed recorded in artifacts");
    sub->add_option("--modes", st.modes, "mode count for the spectrum");
    sub->add_option("--grid", st.grid, "grid resolution override");
    sub->add_flag("--quiet", st.quiet, "suppress progress notes");
  };

  add_common(app.add_subcommand("solve", "solve the penalized PDE from a config"), true);
  add_common(app.add_subcommand("optimize", "minimize the relaxed energy"), true);
  add_common(app.add_subcommand("stability", "radial spectrum and verdict"), true);
  add_common(
      app.add_subcommand("instability-demo", "mode-1 instability sweep with oracle slope"),
      true);
  add_common(app.add_subcommand("validate", "run the release checks"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  st.command = app.get_subcommands().front()->get_name();

  try {
    if (!st.config_path.empty())
      st.config = load_config(st.config_path);
    else if (st.command != "validate")
      throw std::invalid_argument("a config file is required");

    fs::create_directories(st.out_dir);

    if (st.command == "solve") return cmd_solve(st);
    if (st.command == "optimize") return cmd_optimize(st);
    if (st.command == "stability") return cmd_stability(st);
    if (st.command == "instability-demo") return cmd_instability(st);
    return cmd_validate(st);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}
