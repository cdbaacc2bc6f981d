// Contract tests for the rgeom binary: exit codes, JSON records,
// determinism. The binary path arrives via the RGEOM_CLI environment
// variable set by CTest.

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const char* cli = std::getenv("RGEOM_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.out.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string test_dir() {
  const char* dir = std::getenv("RGEOM_TEST_DIR");
  REQUIRE(dir != nullptr);
  return dir;
}

double extract_number(const std::string& json, const std::string& key) {
  const size_t at = json.find("\"" + key + "\":");
  REQUIRE(at != std::string::npos);
  return std::strtod(json.c_str() + at + key.size() + 3, nullptr);
}

}  // namespace

TEST_CASE("manifolds subcommand lists built-ins") {
  const RunResult r = run("manifolds");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"sphere\"") != std::string::npos);
  CHECK(r.out.find("\"halfplane\"") != std::string::npos);
}

TEST_CASE("verify: euclidean passes with exit 0") {
  const RunResult r = run("verify --manifold euclidean2 --samples 3 --seed 7");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"all_pass\":true") != std::string::npos);
}

TEST_CASE("verify: identity failure exits 1") {
  const RunResult r = run("verify --manifold sphere --samples 1 --seed 7");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("\"all_pass\":false") != std::string::npos);
}

TEST_CASE("verify: bad metric file exits 3 and names the missing entry") {
  const std::string path = test_dir() + "/bad.metric";
  std::ofstream(path) << "dim 2; coords a b; g[0][0] = 1;";
  const char* cli = std::getenv("RGEOM_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " verify --manifold " + path +
                          " 2>" + test_dir() + "/bad.err";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 3);
  std::ifstream err(test_dir() + "/bad.err");
  std::string text((std::istreambuf_iterator<char>(err)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("g[1][0]") != std::string::npos);
}

TEST_CASE("verify: config errors exit 2") {
  CHECK(run("verify --manifold euclidean2 --samples 0").exit_code == 2);
  CHECK(run("verify --manifold euclidean2 --tol nope").exit_code == 2);
}

TEST_CASE("verify: byte-identical reports for identical config and seed") {
  const std::string a = test_dir() + "/rep_a.json";
  const std::string b = test_dir() + "/rep_b.json";
  CHECK(run("verify --manifold euclidean2 --samples 2 --seed 11 --out " + a)
            .exit_code == 0);
  CHECK(run("verify --manifold euclidean2 --samples 2 --seed 11 --out " + b)
            .exit_code == 0);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  const std::string ca((std::istreambuf_iterator<char>(fa)),
                       std::istreambuf_iterator<char>());
  const std::string cb((std::istreambuf_iterator<char>(fb)),
                       std::istreambuf_iterator<char>());
  CHECK(ca == cb);
  CHECK(!ca.empty());
}

TEST_CASE("geodesic distance record") {
  const RunResult r =
      run("geodesic --manifold halfplane --from 0,1 --to 1,1");
  CHECK(r.exit_code == 0);
  CHECK(extract_number(r.out, "distance") ==
        doctest::Approx(0.9624236501192069).epsilon(1e-6));
}

TEST_CASE("geodesic initial-value record") {
  const RunResult r = run(
      "geodesic --manifold sphere --from 1.5707963267948966,0 --dir 0,1 "
      "--length 1.5707963267948966");
  CHECK(r.exit_code == 0);
  const size_t at = r.out.find("\"end\":[");
  REQUIRE(at != std::string::npos);
  const double theta = std::strtod(r.out.c_str() + at + 7, nullptr);
  CHECK(theta == doctest::Approx(1.5707963267948966).epsilon(1e-8));
}

TEST_CASE("transport record on euclidean chart keeps components") {
  const RunResult r = run(
      "transport --manifold euclidean2 --at 0,0 --dir 0.5,0.2 --vec 0.3,-0.4 "
      "--kind lambda");
  CHECK(r.exit_code == 0);
  const size_t at = r.out.find("\"result\":[");
  REQUIRE(at != std::string::npos);
  const double first = std::strtod(r.out.c_str() + at + 10, nullptr);
  CHECK(first == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("holonomy record matches curvature times area") {
  const RunResult r = run(
      "holonomy --manifold sphere --at 1.5708,0 --dirs e1,e2 --scale 0.1");
  CHECK(r.exit_code == 0);
  const double angle = extract_number(r.out, "angle");
  CHECK(std::fabs(angle) == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("solver failures exit 4 with a machine-readable reason") {
  const std::string errfile = test_dir() + "/solver.err";
  const char* cli = std::getenv("RGEOM_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd =
      std::string(cli) +
      " geodesic --manifold sphere --from 1.5707963267948966,0 --to 1.2,1.5 "
      "--bvp-max-iter 1 2>" +
      errfile;
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 4);
  std::ifstream err(errfile);
  std::string text((std::istreambuf_iterator<char>(err)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"error\":\"solver\"") != std::string::npos);
}

TEST_CASE("unknown manifold exits 3") {
  CHECK(run("geodesic --manifold torus --from 0,0 --to 1,1").exit_code == 3);
}

TEST_CASE("metric files drive the same queries as built-ins") {
  const std::string path = test_dir() + "/halfplane.metric";
  std::ofstream(path) << "dim 2; coords x y; domain x (-inf,inf) y (0,inf);"
                         " g[0][0] = 1/(y*y); g[1][0] = 0; g[1][1] = 1/(y*y);";
  const RunResult r =
      run("geodesic --manifold " + path + " --from 0,1 --to 1,1");
  CHECK(r.exit_code == 0);
  CHECK(extract_number(r.out, "distance") ==
        doctest::Approx(0.9624236501192069).epsilon(1e-6));
}
