#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "pharec/serialize.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pharec_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(PHAREC_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  const fs::path dir = scratch("usage");
  CHECK(run("") == 2);
  CHECK(run("bogus") == 2);
  CHECK(run("simulate") == 2);
  write(dir / "bad_kind.json", R"({"model": {"kind": "duffing"}})");
  CHECK(run("simulate --config " + (dir / "bad_kind.json").string() + " --out " + (dir / "o").string()) == 2);
  write(dir / "bad_key.json", R"({"model": {"kind": "canonical"}, "vf": {"foo": 1}})");
  CHECK(run("simulate --config " + (dir / "bad_key.json").string() + " --out " + (dir / "o").string()) == 2);
  write(dir / "zero.json", R"({"model": {"kind": "canonical"}, "trials": {"count": 0}})");
  CHECK(run("simulate --config " + (dir / "zero.json").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(run("limit-cycle --from " + (dir / "missing").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("simulate writes a reproducible trial directory") {
  const fs::path dir = scratch("simulate");
  write(dir / "cfg.json", R"({"model": {"kind": "radial_isochron_clock"}, "trials": {"count": 2, "periods": 1}})");
  const std::string base = "simulate --config " + (dir / "cfg.json").string();
  REQUIRE(run(base + " --out " + (dir / "a").string()) == 0);
  REQUIRE(run(base + " --out " + (dir / "b").string() + " --jobs 2") == 0);
  REQUIRE(run(base + " --out " + (dir / "c").string() + " --seed 5") == 0);
  CHECK(fs::exists(dir / "a" / "config.json"));
  CHECK(fs::exists(dir / "a" / "trials" / "manifest.json"));
  const std::string a = slurp(dir / "a" / "trials" / "trial_0000.csv");
  CHECK(a.rfind("t,theta_1,r_1,theta_2,r_2\n", 0) == 0);
  CHECK(a == slurp(dir / "b" / "trials" / "trial_0000.csv"));
  CHECK(a != slurp(dir / "c" / "trials" / "trial_0000.csv"));
  const auto manifest = pharec::read_json_file(dir / "c" / "trials" / "manifest.json");
  CHECK(manifest.dump().find("\"seed\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("extract converts raw signals") {
  const fs::path dir = scratch("extract");
  std::ostringstream csv;
  csv << "t,x,y\n";
  csv.precision(17);
  for (int k = 0; k < 2000; ++k) {
    const double t = k * 1e-3;
    csv << t << ',' << std::cos(2.0 * std::numbers::pi * 10.0 * t) << ',' << std::sin(2.0 * std::numbers::pi * 4.0 * t) << '\n';
  }
  write(dir / "raw.csv", csv.str());
  REQUIRE(run("extract --from " + (dir / "raw.csv").string() + " --out " + (dir / "o").string()) == 0);
  const std::string out = slurp(dir / "o" / "extracted.csv");
  CHECK(out.rfind("t,theta_x,r_x,theta_y,r_y,edge\n", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 2001);
  write(dir / "flat.csv", "t,x\n0,1\n0.001,1\n0.002,1\n");
  CHECK(run("extract --from " + (dir / "flat.csv").string() + " --out " + (dir / "p").string()) != 0);
  fs::remove_all(dir);
}
