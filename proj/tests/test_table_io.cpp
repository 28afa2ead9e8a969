#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "hardwall/errors.hpp"
#include "hardwall/table_io.hpp"

using namespace hardwall;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("git blob hashes match stock git") {
  // `git hash-object` of the empty file and of "hello\n" are well known.
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_sha1("hello\n") ==
        "ce013625030ba8dba906f756967f9e9ca394464a");
  // exercise the multi-block path: 100 lines is past one 64-byte block
  std::string big;
  for (int i = 0; i < 100; ++i) big += "line " + std::to_string(i) + "\n";
  CHECK(git_blob_sha1(big).size() == 40);
  CHECK(git_blob_sha1(big) != git_blob_sha1(big + "x"));
  CHECK(git_blob_sha1(big) == git_blob_sha1(big));
}

TEST_CASE("csv output pins the schema header and exact number formatting") {
  Table t;
  t.columns = {"n", "u", "log_p"};
  t.add_row({long(1), 0.1, -3.5});
  t.add_row({long(2), 4.0, -std::numeric_limits<double>::infinity()});
  nlohmann::json cfg{{"cmd", "tails"}, {"n", 1}};

  std::string csv = render_csv(t, cfg);
  CHECK(csv ==
        "# hardwall csv v1\n"
        "# config {\"cmd\":\"tails\",\"n\":1}\n"
        "n,u,log_p\n"
        "1,0.10000000000000001,-3.5\n"
        "2,4,-inf\n");

  // %.17g must round-trip exactly, including unrepresentable-looking values
  double v = 0.1;
  CHECK(std::stod(format_double(v)) == v);
  v = 1.0 / 3.0;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("json output mirrors the csv content") {
  Table t;
  t.columns = {"k", "g_star", "method"};
  t.add_row({long(3), -0.5, std::string("quad")});
  t.add_row({long(4), std::numeric_limits<double>::quiet_NaN(),
             std::string("quad")});
  nlohmann::json cfg{{"cmd", "free-energy"}};

  nlohmann::json doc = nlohmann::json::parse(render_json(t, cfg));
  CHECK(doc["schema"] == "hardwall json v1");
  CHECK(doc["config"]["cmd"] == "free-energy");
  CHECK(doc["columns"].size() == 3);
  CHECK(doc["rows"].size() == 2);
  CHECK(doc["rows"][0]["k"] == 3);
  CHECK(doc["rows"][0]["g_star"] == -0.5);
  CHECK(doc["rows"][0]["method"] == "quad");
  // non-finite doubles survive as strings instead of json null
  CHECK(doc["rows"][1]["g_star"] == "nan");
}

TEST_CASE("canonical json is insertion-order independent") {
  nlohmann::json a;
  a["seed"] = 7;
  a["n"] = 10;
  nlohmann::json b;
  b["n"] = 10;
  b["seed"] = 7;
  CHECK(canonical_json(a) == canonical_json(b));
  CHECK(git_blob_sha1(canonical_json(a)) == git_blob_sha1(canonical_json(b)));
}

TEST_CASE("rows must match the declared columns") {
  Table t;
  t.columns = {"a", "b"};
  CHECK_THROWS_AS(t.add_row({1.0}), ValidationError);
  CHECK_THROWS_AS(t.add_row({1.0, 2.0, 3.0}), ValidationError);
  t.add_row({1.0, 2.0});
  CHECK(t.rows.size() == 1);
}

TEST_CASE("atomic writes leave no partial files behind") {
  fs::path dir = fs::temp_directory_path() / "hardwall_io_test";
  fs::create_directories(dir);
  fs::path target = dir / "out.csv";

  write_atomic(target.string(), "first\n");
  CHECK(slurp(target) == "first\n");

  // overwrite in place
  write_atomic(target.string(), "second\n");
  CHECK(slurp(target) == "second\n");
  CHECK(!fs::exists(target.string() + ".tmp"));

  // unwritable location: throws and creates nothing
  fs::path bad = dir / "missing_subdir" / "out.csv";
  CHECK_THROWS_AS(write_atomic(bad.string(), "x"), ValidationError);
  CHECK(!fs::exists(bad));
  CHECK(!fs::exists(bad.string() + ".tmp"));

  fs::remove_all(dir);
}
