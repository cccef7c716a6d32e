#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "omlevy/acceptance.hpp"
#include "omlevy/commands.hpp"
#include "omlevy/config.hpp"
#include "omlevy/errors.hpp"

using namespace omlevy;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::map<std::string, std::string> report(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<std::string> values(const std::string& text, const std::string& key) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key + "=", 0) == 0) out.push_back(line.substr(key.size() + 1));
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("omlevy_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig def = parse("");
  CHECK(def.gamma == 3.0);
  CHECK(def.T == 2.0);
  CHECK_FALSE(def.y0.has_value());

  const RunConfig c = parse(
      "# comment\n"
      "[model]\n"
      "potential = double-well   # trailing\n"
      "levy = none\n"
      "[problem]\n"
      "y0 = 1.5\n"
      "yT = -0.25\n"
      "[tube]\n"
      "epsilon = 0.1, 0.2,0.4\n"
      "[numerics]\n"
      "seed = 18446744073709551615\n");
  CHECK(c.potential == "double-well");
  CHECK_FALSE(c.levy);
  CHECK(*c.y0 == 1.5);
  CHECK(c.epsilons == std::vector<double>{0.1, 0.2, 0.4});
  CHECK(c.seed == 18446744073709551615ULL);

  CHECK(error_line("[model]\ngamma = 1\ncolour = red\n") == 3);
  CHECK(error_line("[physics]\n") == 1);
  CHECK(error_line("[model]\n\ngamma = fast\n") == 3);
  CHECK(error_line("gamma = 1\n") == 1);
  CHECK(error_line("[model]\ngamma 1\n") == 2);
  CHECK(error_line("[model]\ngamma = 1\ngamma = 2\n") == 3);
  CHECK(error_line("[problem]\nx0 = 1\nT = 0\n") == 3);
  CHECK(error_line("[numerics]\nseed = -4\n") == 2);
  CHECK(error_line("[model]\nalpha = 1.5\n") == 2);
  CHECK(error_line("[numerics]\nsolver = magic\n") == 2);
  CHECK(error_line("[tube]\nepsilon = 0.1, -1\n") == 2);
  CHECK(error_line("[model]\nlevy = none\nalpha = 1.5\n") == -1);
}

TEST_CASE("print_config round trip") {
  RunConfig c = parse("[problem]\ny0 = 0.1\n[tube]\nepsilon = 0.3, 0.7\npath_b = bend:0.5\n");
  c.mu = 0.8;
  std::ostringstream a;
  print_config(a, c);
  const RunConfig back = parse(a.str());
  std::ostringstream b;
  print_config(b, back);
  CHECK(a.str() == b.str());
  CHECK(back.mu == 0.8);
  CHECK(a.str().find("mu = 0.8\n") != std::string::npos);
}

TEST_CASE("mptp command") {
  const fs::path dir = scratch("mptp");
  RunConfig c;
  c.out_dir = dir.string();
  std::ostringstream out, err;
  REQUIRE(cmd_mptp(c, out, err) == kExitOk);
  auto kv = report(out.str());
  CHECK(kv["solver"] == "velocity-optimization");
  CHECK(std::abs(std::stod(kv["y0_opt"]) - 5.8078) <= 1e-3);
  CHECK(std::abs(std::stod(kv["yT_opt"]) - 0.1904) <= 1e-3);
  CHECK(std::abs(std::stod(kv["action"]) + 3.0) <= 1e-4);
  const Path optimized = read_path_csv((dir / "mptp.csv").string());

  c.y0 = 5.8078;
  c.yT = 0.1904;
  for (const char* solver : {"auto", "el4", "hp"}) {
    c.solver = solver;
    std::ostringstream o2, e2;
    REQUIRE(cmd_mptp(c, o2, e2) == kExitOk);
    const Path given = read_path_csv((dir / "mptp.csv").string());
    double sup = 0.0;
    for (std::size_t i = 0; i < given.nodes(); ++i) {
      sup = std::max(sup, std::abs(given.phi1[i] - optimized.phi1[i]));
    }
    CHECK(sup <= 1e-4);
  }

  c.y0.reset();
  c.solver = "hp";
  std::ostringstream o3, e3;
  CHECK(cmd_mptp(c, o3, e3) == kExitConfig);
  CHECK(e3.str().find("y0") != std::string::npos);

  c.solver = "auto";
  c.T = 0.0;
  std::ostringstream o4, e4;
  CHECK(cmd_mptp(c, o4, e4) == kExitConfig);
  CHECK_FALSE(e4.str().empty());
  fs::remove_all(dir);
}

TEST_CASE("simulate command") {
  const fs::path dir = scratch("simulate");
  RunConfig c;
  c.out_dir = dir.string();
  c.prefix = "bridge_";
  std::ostringstream out, err;
  REQUIRE(cmd_simulate(c, out, err) == kExitOk);
  auto kv = report(out.str());
  CHECK(kv["kept"] == "15");
  CHECK(fs::exists(dir / "bridge_mptp.csv"));
  CHECK(fs::exists(dir / "bridge_path_0014.csv"));
  CHECK_FALSE(fs::exists(dir / "bridge_path_0015.csv"));
  std::ifstream manifest(dir / "bridge_manifest.csv");
  std::string header;
  std::getline(manifest, header);
  CHECK(header == "seed,accepted,endpoint_error");
  const Path p = read_path_csv((dir / "bridge_path_0003.csv").string());
  CHECK(std::abs(p.phi1.back() - 1.0) <= 0.1);

  c.n_keep = 0;
  c.prefix = "empty_";
  std::ostringstream o2, e2;
  CHECK(cmd_simulate(c, o2, e2) == kExitOk);
  std::ifstream empty(dir / "empty_manifest.csv");
  std::string line;
  int lines = 0;
  while (std::getline(empty, line)) ++lines;
  CHECK(lines == 1);

  c.n_keep = 1;
  c.end_tol = 1e-12;
  c.max_attempts = 20;
  std::ostringstream o3, e3;
  CHECK(cmd_simulate(c, o3, e3) == kExitNumerical);
  fs::remove_all(dir);
}

TEST_CASE("tube command") {
  const fs::path dir = scratch("tube");
  RunConfig c = parse(
      "[model]\nlevy = none\n[problem]\nx0 = 0\ny0 = 0\nT = 0.5\n"
      "[tube]\nsamples = 3000\npath_a = flow\nepsilon = 0.2, 0.35, 0.5, 1\n");
  c.out_dir = dir.string();

  std::ostringstream out, err;
  REQUIRE(cmd_tube(c, out, err) == kExitOk);
  const auto p = values(out.str(), "p_hat");
  REQUIRE(p.size() == 4);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(std::stod(p[i]) >= std::stod(p[i - 1]));

  c.path_b = "flow";
  c.epsilons = {0.5};
  std::ostringstream o2, e2;
  REQUIRE(cmd_tube(c, o2, e2) == kExitOk);
  CHECK(report(o2.str())["delta_hat"] == "0");

  c.path_b = "bend:60";
  c.epsilons = {0.05};
  c.samples = 300;
  std::ostringstream o3, e3;
  CHECK(cmd_tube(c, o3, e3) == kExitNumerical);
  CHECK(report(o3.str())["degenerate"] == "true");

  c.path_a = (dir / "missing.csv").string();
  std::ostringstream o4, e4;
  CHECK(cmd_tube(c, o4, e4) == kExitConfig);
  fs::remove_all(dir);
}

TEST_CASE("acceptance checks detect a tampered constant") {
  using namespace omlevy::acceptance;
  CHECK(lambda_constant(0.3989422804).passed);
  CHECK_FALSE(lambda_constant(0.40).passed);
  CHECK_FALSE(lambda_constant(-0.3989422804).passed);
  const std::string line = render({lambda_constant(0.5)});
  CHECK(line.rfind("[FAIL] 1 ", 0) == 0);
  CHECK_FALSE(all_passed({}));
}
