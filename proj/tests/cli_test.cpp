// Exercises the installed command-line surface end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(RWP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli end to end") {
  fs::path tmp = fs::temp_directory_path() / "rwp-cli-test";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  fs::path cfg = fs::path(RWP_ASSETS_DIR) / "uuv-small.json";

  SUBCASE("verify produces the artifact set") {
    fs::path out = tmp / "verify";
    REQUIRE(run("verify --config " + cfg.string() + " --out " + out.string() + " --threads 4") ==
            0);
    for (const char* f : {"weights_final.txt", "verification_log.txt", "iteration_log.txt",
                          "report.json", "regions_before.txt", "regions_after.txt", "timing.json"}) {
      CHECK(fs::exists(out / f));
    }
    CHECK(slurp(out / "report.json").find("\"method\": \"verify-only\"") != std::string::npos);
    CHECK(run("report " + (out / "report.json").string()) == 0);
    CHECK(run("plot-data " + (out / "regions_before.txt").string()) == 0);
  }

  SUBCASE("bad inputs exit nonzero") {
    CHECK(run("verify --config /nonexistent.json") != 0);
    CHECK(run("report /nonexistent.json") != 0);
    CHECK(run("definitely-not-a-subcommand") != 0);
  }

  SUBCASE("seed override changes the sampled artifacts") {
    fs::path o1 = tmp / "s1", o2 = tmp / "s2", o3 = tmp / "s3";
    REQUIRE(run("verify --config " + cfg.string() + " --out " + o1.string() + " --seed 1") == 0);
    REQUIRE(run("verify --config " + cfg.string() + " --out " + o2.string() + " --seed 2") == 0);
    REQUIRE(run("verify --config " + cfg.string() + " --out " + o3.string() + " --seed 1") == 0);
    CHECK(slurp(o1 / "report.json") != slurp(o2 / "report.json"));
    CHECK(slurp(o1 / "report.json") == slurp(o3 / "report.json"));
  }
}
