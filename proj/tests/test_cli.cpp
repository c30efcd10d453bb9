// Drives the installed command-line binary end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / "polargate_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + POLARGATE_CLI + "\" " + args + " > \"" +
                          (workdir() / "stdout.txt").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string out(const char* name) { return "\"" + (workdir() / name).string() + "\""; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("spectrum --no-such-flag") == 2);
  CHECK(run("spectrum --delta-range=5:1:1 --out " + out("e.csv")) == 2);
  CHECK(run("scale --from NoSuchMolecule --out " + out("e.json")) == 2);
  CHECK(run("scan --out " + out("e.csv")) == 2);  // --pulse is required
}

TEST_CASE("undriven spectrum has crossings at 0 and +-V") {
  REQUIRE(run("spectrum --omega-hz 0 --delta-range=-3000:3000:10 --out " + out("s0.csv")) == 0);
  const std::string gaps = slurp(workdir() / "s0.csv.gaps.csv");
  CHECK(gaps.find("\n-1850,") != std::string::npos);
  CHECK(gaps.find("\n0,") != std::string::npos);
  CHECK(gaps.find("\n1850,") != std::string::npos);
  CHECK(fs::exists(workdir() / "s0.csv.manifest.json"));
}

TEST_CASE("reruns are byte-identical") {
  REQUIRE(run("spectrum --delta-range=-2000:2000:50 --out " + out("a.csv")) == 0);
  REQUIRE(run("spectrum --delta-range=-2000:2000:50 --out " + out("b.csv")) == 0);
  CHECK(slurp(workdir() / "a.csv") == slurp(workdir() / "b.csv"));
  CHECK(slurp(workdir() / "a.csv").find('\r') == std::string::npos);

  REQUIRE(run("gauss-scan --delta-range=-100:100:50 --threads 1 --out " + out("g1.csv")) == 0);
  REQUIRE(run("gauss-scan --delta-range=-100:100:50 --threads 3 --out " + out("g2.csv")) == 0);
  CHECK(slurp(workdir() / "g1.csv") == slurp(workdir() / "g2.csv"));
}

TEST_CASE("config file keys act as defaults") {
  std::ofstream(workdir() / "cfg.json") << R"({"omega-hz": 0, "delta-range": "-3000:3000:10"})";
  REQUIRE(run("spectrum --config " + out("cfg.json") + " --out " + out("c.csv")) == 0);
  CHECK(slurp(workdir() / "c.csv.gaps.csv").find("\n1850,") != std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(workdir() / "c.csv.manifest.json"));
  CHECK(manifest.at("config").at("omega-hz") == "0");

  // An explicit flag overrides the file.
  REQUIRE(run("spectrum --config " + out("cfg.json") + " --omega-hz 731 --out " + out("d.csv")) ==
          0);
  CHECK(slurp(workdir() / "d.csv.gaps.csv").find("\n1850,") == std::string::npos);
}

TEST_CASE("scaling command") {
  REQUIRE(run("scale --r-nm 532 --out " + out("z.json")) == 0);
  const auto j = nlohmann::json::parse(slurp(workdir() / "z.json"));
  CHECK(j.at("zeta").get<double>() == doctest::Approx(0.25).epsilon(0.04));
  CHECK(fs::exists(workdir() / "z.json.manifest.json"));
}

}  // TEST_SUITE
