#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin_path() {
  const char* p = std::getenv("ERGOLAB_BIN");
  REQUIRE_MESSAGE(p != nullptr, "ERGOLAB_BIN must point at the built binary");
  return p;
}

std::string config_dir() {
  const char* p = std::getenv("ERGOLAB_CONFIGS");
  REQUIRE_MESSAGE(p != nullptr, "ERGOLAB_CONFIGS must point at the shipped configs");
  return p;
}

int run(const std::string& cmd) {
  int st = std::system(cmd.c_str());
  REQUIRE(st != -1);
  return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing output file: " << p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  fs::path d = fs::path("cli_scratch");
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("a family sweep runs clean and reports the expected cell") {
  fs::path d = scratch();
  std::string cmd = bin_path() + " fluctuations --config " + config_dir() +
                    "/fluctuations-family.json --out " + (d / "fluct").string() +
                    " --format both > /dev/null 2>&1";
  CHECK(run(cmd) == 0);
  std::string csv = slurp(d / "fluct" / "results.csv");
  CHECK(csv.find("S(5),1,,5,") != std::string::npos);
  CHECK(csv.find("count") != std::string::npos);
  std::string summary = slurp(d / "fluct" / "summary.json");
  CHECK(summary.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("reruns with one seed are byte-identical") {
  fs::path d = scratch();
  for (const char* tag : {"a", "b"}) {
    std::string cmd = bin_path() + " upcrossings --config " + config_dir() +
                      "/upcross-bishop.json --out " + (d / tag).string() +
                      " --seed 7 --format both > /dev/null 2>&1";
    CHECK(run(cmd) == 0);
  }
  for (const char* f : {"results.csv", "results.json", "summary.json"}) {
    std::string a = slurp(d / "a" / f), b = slurp(d / "b" / f);
    CHECK(!a.empty());
    CHECK(a == b);
  }
}

TEST_CASE("an eta at half the modulus is rejected up front") {
  fs::path d = scratch();
  fs::path errFile = d / "stderr.txt";
  std::string cmd = bin_path() + " verify-main-bound --config " + config_dir() +
                    "/invalid-eta.json --out " + (d / "bad").string() + " > /dev/null 2> " +
                    errFile.string();
  CHECK(run(cmd) == 2);
  std::string err = slurp(errFile);
  CHECK(err.find("convexity modulus") != std::string::npos);
}

TEST_CASE("a missing config file is a usage error") {
  fs::path d = scratch();
  std::string cmd = bin_path() + " modulus --config " + (d / "no-such-file.json").string() +
                    " --out " + (d / "x").string() + " > /dev/null 2>&1";
  CHECK(run(cmd) == 2);
}

TEST_CASE("blowing the element budget is a resource error") {
  fs::path d = scratch();
  fs::path cfg = d / "budget.json";
  {
    std::ofstream out(cfg);
    out << R"({"schema": "ergolab/1", "kind": "folner-stats",)"
        << R"( "schedule": {"type": "bs12"}, "indices": [40], "emit-elements": true})" << "\n";
  }
  std::string cmd = bin_path() + " folner-stats --config " + cfg.string() + " --out " +
                    (d / "big").string() + " > /dev/null 2>&1";
  CHECK(run(cmd) == 3);
}

TEST_CASE("the config kind must match the subcommand") {
  fs::path d = scratch();
  std::string cmd = bin_path() + " modulus --config " + config_dir() +
                    "/fluctuations-family.json --out " + (d / "mismatch").string() +
                    " > /dev/null 2>&1";
  CHECK(run(cmd) == 2);
}
