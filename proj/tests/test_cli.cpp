#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "semitoric/cli.hpp"
#include "semitoric/io.hpp"

using namespace semitoric;
namespace fs = std::filesystem;

namespace {
struct Result {
  int code;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("semitoric_cli_" + name);
  fs::remove_all(p);
  return p;
}

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "semitoric");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("systems lists the catalog") {
  const fs::path dir = scratch("systems");
  const Result r = cli({"systems", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["models"].size() >= 6);
  CHECK(j["config"]["command"] == "systems");
  CHECK(fs::exists(dir / "systems.json"));
}

TEST_CASE("classify jaynes_cummings lists one focus-focus point") {
  const Result r = cli({"classify", "--model", "jaynes_cummings", "--out", scratch("classify").string()});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  int ff = 0;
  for (const auto& p : j["points"])
    if (p["type"] == "focus-focus") {
      ++ff;
      const auto x = p["point"].get<std::vector<double>>();
      REQUIRE(x.size() == 5);
      CHECK(std::abs(x[2] - 1.0) < 1e-6);
      CHECK(std::abs(x[0]) + std::abs(x[1]) + std::abs(x[3]) + std::abs(x[4]) < 1e-6);
    }
  CHECK(ff == 1);
  CHECK(j["config"]["model"] == "jaynes_cummings");
}

TEST_CASE("taylor jaynes_cummings") {
  const Result r = cli({"taylor", "--model", "jaynes_cummings", "--out", scratch("taylor").string()});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j["focus_focus"].size() == 1);
  CHECK(j["focus_focus"][0]["a10"].get<double>() == doctest::Approx(1.5708).epsilon(1e-4));
  CHECK(j["focus_focus"][0]["a01"].get<double>() == doctest::Approx(3.4657).epsilon(1e-4));
}

TEST_CASE("spectrum spin_toric j=10 writes 21 rows, deterministically") {
  const fs::path a = scratch("spectrum_a"), b = scratch("spectrum_b");
  REQUIRE(cli({"spectrum", "--model", "spin_toric", "--j", "10", "--out", a.string()}).code == 0);
  const std::string csv = slurp(a / "spectrum.csv");
  std::istringstream lines(csv);
  std::string line;
  int rows = -1;  // header
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 21);
  CHECK(csv.rfind("hbar,lambda1,lambda2,block\n", 0) == 0);
  CHECK(fs::exists(a / "spectrum.svg"));

  REQUIRE(cli({"spectrum", "--model", "spin_toric", "--j", "10", "--out", b.string()}).code == 0);
  CHECK(slurp(b / "spectrum.csv") == csv);
  // The embedded output directory differs; everything else matches.
  Json ja = Json::parse(slurp(a / "spectrum.json")), jb = Json::parse(slurp(b / "spectrum.json"));
  ja["config"].erase("output_dir");
  jb["config"].erase("output_dir");
  CHECK(ja == jb);
}

TEST_CASE("config file and flag override") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  std::ofstream(dir / "run.json") << R"({"model": "spin_toric", "j_values": [4]})";
  const Result r = cli({"--config", (dir / "run.json").string(), "spectrum", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["spectra"][0]["points"] == 9);
  CHECK(j["config"]["j_values"] == Json::array({4.0}));
}

TEST_CASE("periods, polygon and sweep") {
  const fs::path dir = scratch("misc");
  const Result p = cli({"periods", "--model", "cpn_rotation", "--value", "0.3,0.3", "--out", dir.string()});
  REQUIRE(p.code == 0);
  CHECK(Json::parse(p.out)["lattices"][0]["tau2"].get<double>() == doctest::Approx(2 * 3.141592653589793));

  const Result g = cli({"polygon", "--model", "cpn_rotation", "--resolution", "16", "--out", dir.string()});
  REQUIRE(g.code == 0);
  const Json pj = Json::parse(g.out);
  CHECK(pj["polygon"]["vertices"].size() == 3);
  CHECK(pj["delzant"]["pass"] == true);
  CHECK(fs::exists(dir / "polygon.svg"));

  const Result s = cli({"sweep", "--model", "coupled_angular_momenta", "--parameter", "t", "--steps", "11", "--out",
                        dir.string()});
  REQUIRE(s.code == 0);
  CHECK(Json::parse(s.out)["transitions"].size() == 2);
}

TEST_CASE("recover from a spectrum file") {
  const fs::path dir = scratch("recover");
  REQUIRE(cli({"spectrum", "--model", "jaynes_cummings", "--j", "20,40", "--out", dir.string()}).code == 0);
  const Result r = cli({"recover", "--spectrum", (dir / "spectrum.csv").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j["marked_values"].size() == 1);
  const auto v = j["marked_values"][0]["value"].get<std::vector<double>>();
  CHECK(std::hypot(v[0] - 1.0, v[1]) < 0.05);
  CHECK(fs::exists(dir / "recover.svg"));
}

TEST_CASE("exit codes and structured errors") {
  const fs::path dir = scratch("errors");
  const Result unknown = cli({"classify", "--model", "nope", "--out", dir.string()});
  CHECK(unknown.code == 2);
  CHECK(Json::parse(unknown.err)["error"] == "UnknownModel");

  const Result bad_param = cli({"classify", "--model", "coupled_angular_momenta", "--param", "R1=3", "--out", dir.string()});
  CHECK(bad_param.code == 2);
  CHECK(Json::parse(bad_param.err)["error"] == "BadParameter");

  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"classify", "--resolution", "x"}).code == 2);
  CHECK(cli({}).code == 2);

  const Result numeric = cli({"periods", "--model", "jaynes_cummings", "--value", "1,0", "--out", dir.string()});
  CHECK(numeric.code == 3);
  CHECK(Json::parse(numeric.err)["error"] == "SingularValue");

  const Result no_ff = cli({"taylor", "--model", "cpn_rotation", "--out", dir.string()});
  CHECK(no_ff.code != 0);
  CHECK(Json::parse(no_ff.err)["error"] == "NotFocusFocus");
}
