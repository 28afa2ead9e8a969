#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

#include "hardwall/cli.hpp"
#include "hardwall/gaussian.hpp"
#include "hardwall/model.hpp"

using namespace hardwall;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"hardwall"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : owned) argv.push_back(s.c_str());
  return cli_run(int(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// data rows of a v1 csv: everything after the two # lines and the header
std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    lines.push_back(csv.substr(pos, nl - pos));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "# hardwall csv v1");
  CHECK(lines[1].rfind("# config ", 0) == 0);
  return {lines.begin() + 3, lines.end()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "hardwall_cli_tests") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name) const { return path / name; }
};

}  // namespace

TEST_CASE("tails expands a u range inclusively and tags every output") {
  TempDir tmp;
  fs::path out = tmp.file("tails.csv");
  REQUIRE(run({"tails", "--n", "6", "--u", "0:3:1", "--out",
               out.string()}) == 0);
  std::string csv = slurp(out);
  std::vector<std::string> rows = data_rows(csv);
  REQUIRE(rows.size() == 4);  // 0, 1, 2, 3: the stop is part of the range
  CHECK(rows[0].rfind("6,0,", 0) == 0);
  CHECK(rows[3].rfind("6,3,", 0) == 0);
  CHECK(csv.find("\"cmd\":\"tails\"") != std::string::npos);
  CHECK(csv.find("\"n\":6") != std::string::npos);
}

TEST_CASE("depth one at the wall matches the two-leaf closed form") {
  TempDir tmp;
  fs::path out = tmp.file("d1.csv");
  REQUIRE(run({"tails", "--n", "1", "--u", "0", "--out", out.string()}) ==
          0);
  std::vector<std::string> rows = data_rows(slurp(out));
  REQUIRE(rows.size() == 1);
  // row is n,u,log_p,dlog_p,residual; pull the third field
  std::size_t a = rows[0].find(',');
  std::size_t b = rows[0].find(',', a + 1);
  std::size_t c = rows[0].find(',', b + 1);
  double log_p = std::stod(rows[0].substr(b + 1, c - b - 1));
  // two independent leaves, each N(0,1), both at least -m(1) = -c0
  double expected = 2.0 * log_normal_cdf(ModelParams::c0());
  CHECK(log_p == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("bad inputs exit 1 and leave no partial file behind") {
  TempDir tmp;
  fs::path out = tmp.file("never.csv");

  CHECK(run({"tails", "--n", "6", "--u", "3:0:1", "--out", out.string()}) ==
        1);
  CHECK(run({"tails", "--n", "6", "--u", "1:x:1", "--out", out.string()}) ==
        1);
  CHECK(run({"tails", "--n", "6", "--u", "0:4:-1", "--out",
             out.string()}) == 1);
  CHECK(!fs::exists(out));

  CHECK(run({"frobnicate", "--n", "4"}) == 1);
  CHECK(run({"tails", "--n", "6"}) == 1);  // --u is required

  // tiled interior chains need a threshold deep enough for an interior site
  CHECK(run({"tv", "--n", "8", "--v", "0", "--vprime", "1", "--out",
             out.string()}) == 1);
  CHECK(!fs::exists(out));
}

TEST_CASE("reruns of a seeded sample are byte identical") {
  TempDir tmp;
  fs::path out = tmp.file("sample.csv");
  std::initializer_list<std::string> cmd = {
      "sample", "--n", "8", "--u", "1.5", "--method", "tilted",
      "--trials", "20000", "--seed", "12345", "--out", out.string()};
  REQUIRE(run(cmd) == 0);
  std::string first = slurp(out);
  REQUIRE(run(cmd) == 0);
  CHECK(slurp(out) == first);
  CHECK(first.find("\"seed\":12345") != std::string::npos);
}

TEST_CASE("json format emits the v1 schema with the config embedded") {
  TempDir tmp;
  fs::path out = tmp.file("profile.json");
  REQUIRE(run({"profile", "--n", "12", "--u", "5", "--l", "4", "--format",
               "json", "--out", out.string()}) == 0);
  nlohmann::json doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["schema"] == "hardwall json v1");
  CHECK(doc["config"]["cmd"] == "profile");
  CHECK(doc["config"]["u"] == 5.0);
  REQUIRE(doc["rows"].size() == 5);  // sites 0..4
  CHECK(doc["rows"][0]["k"] == 0);
  CHECK(doc["rows"][4]["var"].get<double>() > 0.0);
}

TEST_CASE("verify subsets run, report, and hash their configuration") {
  TempDir tmp;
  fs::path out = tmp.file("report.json");
  REQUIRE(run({"verify", "--only", "closed-form", "--out", out.string()}) ==
          0);
  nlohmann::json doc = nlohmann::json::parse(slurp(out));
  REQUIRE(doc["criteria"].size() == 1);
  CHECK(doc["criteria"][0]["passed"] == true);
  CHECK(doc["all_passed"] == true);
  CHECK(doc["config"]["cmd"] == "verify");
  CHECK(doc["config_hash"].get<std::string>().size() == 40);

  // a filter that matches nothing is a vacuous pass, not an error
  CHECK(run({"verify", "--only", "no-such-criterion"}) == 0);
}
