#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crossreg/config.hpp"
#include "crossreg/report.hpp"

using namespace crossreg;
namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

const std::string kGallery = CROSSREG_GALLERY_DIR;
const std::string kCli = CROSSREG_CLI_PATH;

std::string gallery(const std::string& name) { return kGallery + "/" + name + ".yaml"; }

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / ("crossreg_cli_" + std::to_string(std::rand()) + ".txt");
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + out.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(out);
  return r;
}

Json run_json(const std::string& args, int expect = 0) {
  const Run r = run(args);
  INFO(r.out);
  REQUIRE(r.code == expect);
  return Json::parse(r.out);
}

}  // namespace

TEST_CASE("gallery files round-trip", "[cli][property]") {
  int files = 0;
  for (const auto& e : fs::directory_iterator(kGallery)) {
    if (e.path().extension() != ".yaml") continue;
    ++files;
    INFO(e.path());
    const SystemConfig a = load_config(e.path().string());
    const std::string text = dump_config(a);
    const SystemConfig b = parse_config(text);
    CHECK(a == b);
    CHECK(dump_config(b) == text);
    CHECK_NOTHROW(a.system());
    if (a.regularization) CHECK_NOTHROW(a.regularized());
  }
  CHECK(files >= 12);
}

TEST_CASE("config validation", "[cli]") {
  const std::string base = "X1: \"1\"\nX2: \"2\"\nY1: \"2\"\nY2: \"1\"\n";
  CHECK_NOTHROW(parse_config(base));

  try {
    parse_config(base + "colour: red\n", "f.yaml");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line == 5);
    CHECK_THAT(e.what(), ContainsSubstring("colour"));
  }
  CHECK_THROWS_AS(parse_config(base + "tau_rel: -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "domain_radius: 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "regularization: {epsilon: -0.1, phi: st_linear, psi: st_linear}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(base + "regularization: {phi: nope, psi: st_linear}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "regularization: {phi: st_linear, psi: st_linear, G: {kind: eqG, free: {zz: 1}}}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("X1: \"1 +\"\nX2: \"2\"\nY1: \"2\"\nY2: \"1\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("X1: \"1\"\nX2: \"2\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("X1: [1\n"), ConfigError);

  const SystemConfig c = parse_config(base + "params: {mu: 0.5}\n");
  CHECK_THROWS_AS(c.system({{"nu", 1.0}}), ConfigError);
  CHECK(c.system({{"mu", 2.0}}).params().at("mu") == 2.0);
  CHECK_THROWS_AS(c.regularized(), ConfigError);
}

TEST_CASE("cli classify", "[cli]") {
  const Json a0 = run_json("classify " + gallery("panel_A0"));
  CHECK(a0["class_label"] == "A0");
  CHECK(run_json("classify " + gallery("panel_B0"))["class_label"] == "B0");
  CHECK(run_json("classify " + gallery("dpe_family") + " --param alpha=0")["class_label"] == "B1");

  const Run missing = run("classify " + kGallery + "/no_such_file.yaml");
  CHECK(missing.code == 2);
  CHECK_THAT(missing.out, ContainsSubstring("cannot open"));
  CHECK(run("classify " + gallery("panel_A0") + " --param nu=1").code == 2);
  CHECK(run("classify " + gallery("panel_A0") + " --param mu").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("cli regularize", "[cli]") {
  const Json h = run_json("regularize " + gallery("hopf") + " --mu 0 --grid 60");
  CHECK(h["origin_is_equilibrium"] == true);
  CHECK_THAT(h["origin"]["closed_form"]["det"].get<double>(), WithinRel(81.0 / 16.0, 1e-10));
  CHECK(std::fabs(h["origin"]["closed_form"]["tr"].get<double>()) < 1e-10);
  CHECK(h["origin"]["hyperbolicity"]["verdict"] == "NonHyperbolic");

  const Json b = run_json("regularize " + gallery("panel_B0") + " --grid 60");
  CHECK(b["equilibria"].empty());

  const Run grid = run("regularize " + gallery("curves") + " --dump-grid 20");
  REQUIRE(grid.code == 0);
  CHECK(std::count(grid.out.begin(), grid.out.end(), '\n') == 401);
}

TEST_CASE("cli bifurcate", "[cli]") {
  const Json tc = run_json("bifurcate " + gallery("family_transcritical"));
  CHECK(tc["kind"] == "Transcritical");
  CHECK(tc.contains("alpha0"));
  CHECK(run_json("bifurcate " + gallery("family_saddlenode"))["kind"] == "SaddleNode");
  CHECK(run_json("bifurcate " + gallery("fixed_eta"))["kind"] == "SaddleNode");

  const Json hopf = run_json("bifurcate " + gallery("hopf") + " --sweep mu=-0.05:0.05:11");
  CHECK(std::fabs(hopf["mu_star"].get<double>()) < 1e-9);
  CHECK(hopf["lyapunov_sign"] == "positive (subcritical)");
  CHECK(hopf["sweep"].size() == 11);

  // no bifurcation block is an input error
  CHECK(run("bifurcate " + gallery("panel_A0")).code == 2);
  CHECK(run("bifurcate " + gallery("hopf") + " --sweep mu=1:0:3").code == 2);
}

TEST_CASE("cli portrait and verify", "[cli]") {
  const Run p = run("portrait " + gallery("panel_A0") + " --seeds grid:5x5 --t 3");
  REQUIRE(p.code == 0);
  CHECK_THAT(p.out, ContainsSubstring("25 trajectories, 0 failed"));
  CHECK_THAT(p.out, ContainsSubstring("\n24,"));

  const Run r = run("portrait " + gallery("hopf") + " --regularized --mu 0.01 --seeds 0.01,0 --t 2");
  CHECK(r.code == 0);

  const Run list = run("verify --list");
  CHECK(list.code == 0);
  CHECK_THAT(list.out, ContainsSubstring("jacobian-oracle"));
  CHECK_THAT(list.out, ContainsSubstring("filippov-suite"));

  const Run one = run("verify --only jacobian-oracle");
  CHECK(one.code == 0);
  CHECK_THAT(one.out, ContainsSubstring("PASS  1"));
  CHECK(run("verify --only nonsense").code == 2);
}
