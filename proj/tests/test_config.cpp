#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "semshape/cli.hpp"
#include "semshape/config.hpp"

using namespace semshape;
namespace fs = std::filesystem;

namespace {

std::string cfg_path(const char* name) {
  return std::string(TEST_CONFIG_DIR) + "/" + name;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "semshape");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

const char* kSample = R"(# top-level scalars
m = 2.5
rho = 0.05   # inline comment
M = 1e3

[grid]
L = 1.5
n = 48

[f]
kind = affine
params = 1 -2
trunc = 0.75

[g]
kind = radial_affine
params = 2 -0.35
h1 = 1 2
radial = 1
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("parser handles sections, comments and typed accessors") {
  const Config c = parse_config(kSample);
  CHECK(c.has("m"));
  CHECK(c.has("grid.L"));
  CHECK(!c.has("grid.missing"));
  CHECK(c.get_double("m") == 2.5);
  CHECK(c.get_double("rho") == 0.05);
  CHECK(c.get_double("M") == 1e3);
  CHECK(c.get_int("grid.n", 0) == 48);
  CHECK(c.get_string("f.kind") == "affine");
  CHECK(c.get_string("absent", "dflt") == "dflt");
  CHECK(c.get_double("absent", 7.0) == 7.0);
  CHECK(c.get_int("absent", 9) == 9);

  const std::vector<double> p = c.get_list("f.params");
  REQUIRE(p.size() == 2);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -2.0);
  const std::vector<double> fb = c.get_list("absent", {3.0});
  REQUIRE(fb.size() == 1);
  CHECK(fb[0] == 3.0);
}

TEST_CASE("parser rejects malformed input with line numbers") {
  CHECK_THROWS_AS(parse_config("just a line without equals\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[grid\nL = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("= 3\n"), std::invalid_argument);

  const Config c = parse_config("x = 1.5pt\nk = 2.5\nempty =\n");
  CHECK_THROWS_AS(c.get_double("x"), std::invalid_argument);
  CHECK_THROWS_AS(c.get_int("k", 0), std::invalid_argument);
  CHECK_THROWS_AS(c.get_list("empty"), std::invalid_argument);
  CHECK_THROWS_AS(c.get_string("nope"), std::invalid_argument);
  CHECK_THROWS_AS(c.get_list("nope"), std::invalid_argument);
}

TEST_CASE("config hash is a stable 16-digit fingerprint of the bytes") {
  const Config a = parse_config(kSample);
  const Config b = parse_config(kSample);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash_hex() == b.hash_hex());
  CHECK(a.hash_hex().size() == 16);
  for (char ch : a.hash_hex()) CHECK(((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f')));

  // whitespace and comments are part of the fingerprint: the raw bytes name
  // the artifact, not the parsed view
  const Config c = parse_config(std::string(kSample) + "# trailing note\n");
  CHECK(c.hash() != a.hash());
}

TEST_CASE("problem setup maps every canonical key") {
  const ProblemSetup ps = setup_from_config(parse_config(kSample));
  CHECK(ps.grid.L == 1.5);
  CHECK(ps.grid.n == 48);
  CHECK(ps.f.kind == NonlinearityKind::Affine);
  CHECK(ps.f.eval(0.0, 0) == 1.0);
  CHECK(ps.f.eval(0.25, 1) == -2.0);
  CHECK(ps.f.trunc == 0.75);
  CHECK(ps.g.kind == Source::Kind::RadialAffine);
  CHECK(ps.g.radial(1.0) == doctest::Approx(1.65).epsilon(1e-15));
  REQUIRE(ps.g.h1_bounds.has_value());
  CHECK(ps.g.h1_bounds->first == 1.0);
  CHECK(ps.g.h1_bounds->second == 2.0);
  CHECK(ps.g.radial_nonincreasing);
  CHECK(ps.m == 2.5);
  CHECK(ps.rho == 0.05);
  CHECK(ps.M == 1e3);

  // grid override replaces the configured resolution
  CHECK(setup_from_config(parse_config(kSample), 96).grid.n == 96);
}

TEST_CASE("problem setup fills in the documented defaults") {
  const ProblemSetup ps = setup_from_config(parse_config(""));
  CHECK(ps.grid.L == 1.0);
  CHECK(ps.grid.n == 64);
  CHECK(ps.f.is_zero());
  CHECK(ps.g.kind == Source::Kind::Constant);
  CHECK(ps.g.at(0.3, -0.2) == 1.0);
  CHECK(!ps.g.h1_bounds.has_value());
  CHECK(!ps.g.radial_nonincreasing);
  CHECK(ps.m == ps.grid.area());
  CHECK(ps.rho == 0.0);
  CHECK(ps.M == 1e4);

  // g.value is the shorthand for a constant load
  CHECK(setup_from_config(parse_config("[g]\nvalue = 2.5\n")).g.at(0, 0) == 2.5);
}

TEST_CASE("problem setup accepts tabulated nonlinearities") {
  const char* text =
      "[f]\n"
      "kind = table\n"
      "x = 0 1\n"
      "values = -1 -2\n"
      "derivs = -1 -1\n";
  const ProblemSetup ps = setup_from_config(parse_config(text));
  CHECK(ps.f.kind == NonlinearityKind::Table);
  CHECK(ps.f.eval(0.0, 0) == -1.0);
  CHECK(ps.f.eval(0.5, 0) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(ps.f.eval(0.5, 2) == 0.0);
}

TEST_CASE("problem setup rejects contradictory keys") {
  CHECK_THROWS_AS(setup_from_config(parse_config("[f]\nkind = cubic\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("[f]\nkind = affine\nparams = 1\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("[g]\nkind = gaussian\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("[g]\nkind = constant\nparams = 1 2\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("[g]\nkind = radial_affine\nparams = 2\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("[g]\nh1 = 1\n")), std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("m = 0\n")), std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("m = -1\n")), std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("rho = -0.1\n")), std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("M = 0\n")), std::invalid_argument);
  CHECK_THROWS_AS(setup_from_config(parse_config("[grid]\nn = 4\n")), std::invalid_argument);
}

TEST_CASE("cli rejects bad invocations without touching the filesystem") {
  CHECK(run({"bogus-command"}) == 1);
  CHECK(run({}) == 1);
  CHECK(run({"optimize"}) == 1);  // --config is required
  CHECK(run({"optimize", "--config", cfg_path("does_not_exist.cfg")}) == 1);
}

TEST_CASE("cli stability run writes the named artifacts") {
  const fs::path dir = fresh_dir("semshape_cli_stability");
  CHECK(run({"stability", "--config", cfg_path("ball_g1.cfg"), "--out", dir.string(),
             "--quiet"}) == 0);

  const std::string hash = load_config(cfg_path("ball_g1.cfg")).hash_hex();
  const fs::path jpath = dir / ("stability-" + hash + ".json");
  REQUIRE(fs::exists(jpath));
  REQUIRE(fs::exists(dir / ("stability-" + hash + ".csv")));
  REQUIRE(fs::exists(dir / ("stability-" + hash + ".dat")));

  const nlohmann::json j = load_json(jpath);
  CHECK(j.at("tool") == "semshape");
  CHECK(j.at("command") == "stability");
  CHECK(j.at("config_hash") == hash);
  CHECK(j.at("verdict") == "marginally-stable");
  CHECK(std::fabs(j.at("omega_1").get<double>()) <= 1e-6);
  CHECK(j.at("omega").size() == 20);
  CHECK(std::fabs(j.at("fit_slope").get<double>() - 3.14159265358979323846 / 4.0) <= 1e-3);
  CHECK(std::fabs(j.at("boundary_slope").get<double>() + 0.5) <= 1e-8);
}

TEST_CASE("cli artifacts are byte-stable across runs") {
  const fs::path d1 = fresh_dir("semshape_cli_det1");
  const fs::path d2 = fresh_dir("semshape_cli_det2");
  for (const fs::path& d : {d1, d2})
    CHECK(run({"stability", "--config", cfg_path("ball_stable.cfg"), "--out", d.string(),
               "--quiet"}) == 0);
  const std::string hash = load_config(cfg_path("ball_stable.cfg")).hash_hex();
  for (const char* ext : {"json", "csv", "dat"}) {
    const std::string name = std::string("stability-") + hash + "." + ext;
    CHECK(slurp(d1 / name) == slurp(d2 / name));
  }
  const nlohmann::json j = load_json(d1 / ("stability-" + hash + ".json"));
  CHECK(j.at("verdict") == "stable");
  CHECK(std::fabs(j.at("c1").get<double>() - 1.0 / 3.0) <= 1e-4);
}

TEST_CASE("cli solve run reports its diagnostics") {
  const fs::path dir = fresh_dir("semshape_cli_solve");
  CHECK(run({"solve", "--config", cfg_path("solve_demo.cfg"), "--out", dir.string(),
             "--quiet"}) == 0);
  const std::string hash = load_config(cfg_path("solve_demo.cfg")).hash_hex();
  REQUIRE(fs::exists(dir / ("solve-" + hash + ".csv")));
  const nlohmann::json j = load_json(dir / ("solve-" + hash + ".json"));
  CHECK(j.at("iterations").get<int>() >= 2);
  CHECK(j.at("sup_u").get<double>() > 0.0);
  CHECK(j.at("cg_iterations_total").get<int>() > 0);
  CHECK(j.at("grid_n").get<int>() == 48);
}

TEST_CASE("cli instability sweep matches its oracle") {
  const fs::path dir = fresh_dir("semshape_cli_inst");
  CHECK(run({"instability-demo", "--config", cfg_path("instability.cfg"), "--out",
             dir.string(), "--quiet"}) == 0);
  const std::string hash = load_config(cfg_path("instability.cfg")).hash_hex();
  const nlohmann::json j = load_json(dir / ("instability-demo-" + hash + ".json"));
  CHECK(std::fabs(j.at("sigma").get<double>() + 7.0 / 32.0) <= 1e-3);
  CHECK(j.at("all_unstable") == true);
  CHECK(j.at("destabilizing_mode") == 1);
  REQUIRE(j.at("rows").size() == 3);
  for (const nlohmann::json& row : j.at("rows")) CHECK(row.at("unstable") == true);
}

TEST_CASE("cli surfaces non-convergence as exit code 2") {
  const fs::path dir = fresh_dir("semshape_cli_nonconv");
  CHECK(run({"stability", "--config", cfg_path("nonconvergent.cfg"), "--out", dir.string(),
             "--quiet"}) == 2);
}

TEST_SUITE_END();
