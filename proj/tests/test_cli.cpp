#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("dropforge_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string(DROPFORGE_CLI) + " " + args + " 2>" + err.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  for (std::size_t got; (got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("expand --n 1").code == 2);
  CHECK(run("expand --order 25").code == 2);
  CHECK(run("expand --format xml").code == 2);
}

TEST_CASE("expand prints rational coefficients") {
  const Run r = run("expand --n 2 --order 3");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("k,R,theta,R_decimal,theta_decimal\n", 0) == 0);
  CHECK(r.out.find("\n2,-5/8,0,") != std::string::npos);
  CHECK(r.out.find("\n3,0,-77/48,") != std::string::npos);

  const Run j = run("expand --n 3 --order 4 --format json");
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["n"] == 3);
  CHECK(doc["R"].size() == 5);
  CHECK(doc["R"][2] == "-3/8");
}

TEST_CASE("singular profile csv") {
  const Run r = run("singular --n 2 --z-end 2");
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "Z,R,theta,z,r,H");
  std::size_t rows = 0;
  double last_z = 0.0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
    last_z = std::stod(line.substr(line.find(',', line.find(',', line.find(',') + 1) + 1) + 1));
  }
  CHECK(rows > 10);
  CHECK(last_z == doctest::Approx(2.0));
  CHECK(r.err.find("SpanEnd") != std::string::npos);
}

TEST_CASE("output file keeps stdout for the summary") {
  const fs::path out = scratch() / "drop.svg";
  const Run r = run("drop --n 2 --dr 0.1,-0.1 --format svg --out " + out.string());
  REQUIRE(r.code == 0);
  const std::string svg = slurp(out);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(!r.out.empty());
  CHECK(r.out.find("<svg") == std::string::npos);
}

TEST_CASE("phase csv and svg") {
  const Run c = run("phase --nr 2 --ntheta 3 --format csv");
  REQUIRE(c.code == 0);
  CHECK(c.out.find('\n') != std::string::npos);
  const Run s = run("phase --nr 3 --ntheta 3");
  REQUIRE(s.code == 0);
  std::size_t polylines = 0;
  for (std::size_t p = s.out.find("<polyline"); p != std::string::npos; p = s.out.find("<polyline", p + 1)) {
    ++polylines;
  }
  CHECK(polylines == 9);
  CHECK(run("phase --nr 0").code == 2);
}

TEST_CASE("diverge validates its offsets") {
  const Run r = run("diverge --n 2 --offset 1e-4 --points 101");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("offset,", 0) == 0);
  CHECK(run("diverge --offset 0").code == 2);
  CHECK(run("diverge --offset 2").code == 2);
  CHECK(run("diverge --component phi").code == 2);
}

TEST_CASE("verify writes a report and fails on a forced failure") {
  const fs::path dir = scratch() / "verify_forced";
  const Run r = run("verify --n 2 --force-failure --out " + dir.string());
  CHECK(r.code == 1);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["passed"] == false);
  CHECK(doc["criteria"][2]["passed"] == false);
  CHECK(doc["criteria"][2]["id"] == 3);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "expansion_n2.json"));
  const auto saved = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(!saved["criteria"][0].contains("runtime_s"));
  CHECK(doc["criteria"][0].contains("runtime_s"));
}
