#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "golden.hpp"
#include "json.hpp"
#include "splinequad/cli.hpp"
#include "splinequad/rule_io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = splinequad::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "splinequad_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("rule as JSON") {
  const auto r = run({"rule", "-d", "5", "-c", "1", "-N", "10"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["provenance"] == "traced");
  CHECK(j["degree"] == 5);
  CHECK(j["continuity"] == 1);
  CHECK(j["nodes"].size() == 21);
  const auto g = golden::load("d5c1n10");
  for (const auto& row : g.rows) {
    CHECK(std::abs(j["nodes"][row.i - 1].get<double>() - row.tau) <= 1e-12);
    CHECK(std::abs(j["weights"][row.i - 1].get<double>() - row.omega) <= 1e-12);
  }
  CHECK(j["residual_norm"].get<double>() <= 1e-13);
  CHECK(j.contains("trace"));
}

TEST_CASE("rule as CSV") {
  const auto r = run({"rule", "-d", "7", "-c", "1", "-N", "2", "--interval", "0", "1", "--format",
                      "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "element,i,tau,omega");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto dot = line.find('.');
    const auto comma = line.find(',', dot);
    CHECK(comma - dot - 1 == 20);
  }
  CHECK(rows == 7);
}

TEST_CASE("rule from a knot file") {
  const auto r = run({"rule", "-d", "7", "--knots", golden::data_path("knots/nonuniform_d7.json")});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["nodes"].size() == 19);
  const auto g = golden::load("d7_nonuniform_n6");
  for (const auto& row : g.rows) {
    CHECK(std::abs(j["nodes"][row.i - 1].get<double>() - row.tau) <= 1e-11);
  }
}

TEST_CASE("parity violations are reported") {
  const auto r = run({"rule", "-d", "5", "-c", "0", "-N", "100"});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  const auto e = json::parse(r.err);
  CHECK(e["error"] == "parity");
  CHECK(e["message"].get<std::string>().find("odd") != std::string::npos);

  const auto h = run({"hybrid", "-d", "5", "-c", "0", "-N", "100"});
  CHECK(h.code == 1);
  CHECK(json::parse(h.err)["error"] == "parity");
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"rule", "-c", "1", "-N", "3"}).code == 2);
  CHECK(run({"rule", "-d", "5"}).code == 2);
  CHECK(run({"rule", "-d", "5", "-c", "1", "-N", "3", "--format", "xml"}).code == 2);
  CHECK(run({"rule", "-d", "5", "-c", "1", "-N", "3", "--interval", "1", "0"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("validate accepts a traced rule and rejects a perturbed one") {
  const auto r = run({"rule", "-d", "5", "-c", "0", "-N", "3"});
  REQUIRE(r.code == 0);
  const auto good = scratch("good.json");
  write(good, r.out);
  const auto v = run({"validate", good.string()});
  CHECK(v.code == 0);
  const auto rep = json::parse(v.out);
  CHECK(rep["passed"] == true);
  CHECK(rep["max_basis_error"].get<double>() <= 1e-12);
  CHECK(rep["samples"] == 100);

  auto doc = json::parse(r.out);
  doc["weights"][2] = doc["weights"][2].get<double>() + 1e-6;
  const auto bad = scratch("bad.json");
  write(bad, doc.dump());
  const auto vb = run({"validate", bad.string()});
  CHECK(vb.code == 1);
  CHECK(json::parse(vb.out)["passed"] == false);
  CHECK(json::parse(vb.err)["error"] == "validation");

  const auto broken = scratch("broken.json");
  write(broken, "{\"nodes\": [1, 2");
  CHECK(run({"validate", broken.string()}).code != 0);
  CHECK(run({"validate", scratch("missing.json").string()}).code != 0);
}

TEST_CASE("asymptotic pattern") {
  const auto r = run({"asymptotic", "-d", "7", "-c", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["provenance"] == "asymptotic");
  CHECK(j["period"] == 1);
  REQUIRE(j["nodes"].size() == 3);
  CHECK(std::abs(j["nodes"][1].get<double>() - (7.0 - std::sqrt(7.0)) / 14.0) <= 1e-15);
  CHECK(std::abs(j["weights"][0].get<double>() - 37.0 / 135) <= 1e-15);

  const auto p = scratch("pattern.json");
  write(p, r.out);
  CHECK(run({"validate", p.string()}).code == 0);
}

TEST_CASE("hybrid rule") {
  const auto r = run({"hybrid", "-d", "5", "-c", "0", "-N", "101", "--boundary-depth", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["provenance"] == "hybrid");
  CHECK(j["residual_norm"].get<double>() <= 1e-12);
  const auto f = scratch("hybrid.json");
  write(f, r.out);
  CHECK(run({"validate", f.string()}).code == 0);

  CHECK(run({"hybrid", "-d", "5", "-c", "2", "-N", "31"}).code == 2);
}

TEST_CASE("assemble report and matrices") {
  const auto r = run({"assemble", "-p", "3", "-k", "2", "-l", "1", "-N", "30"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["classical"]["interior_nodes_per_element"].get<double>() == doctest::Approx(4.0));
  CHECK(j["optimal"]["interior_nodes_per_element"].get<double>() == doctest::Approx(3.0));
  CHECK(j["mass_difference"].get<double>() <= 1e-12);

  const auto m = run({"assemble", "-p", "2", "-k", "1", "-l", "1", "-N", "5", "--matrix", "mass"});
  REQUIRE(m.code == 0);
  int lines = 0;
  for (char ch : m.out) lines += ch == '\n';
  CHECK(lines == 7);
  const auto t = run({"assemble", "-p", "2", "-k", "1", "-l", "1", "-N", "5", "--matrix",
                      "stiffness", "--matrix-format", "triplets"});
  CHECK(t.code == 0);
  CHECK(t.out.rfind("0 0 ", 0) == 0);
  CHECK(run({"assemble", "-p", "2", "-k", "2", "-l", "1", "-N", "4"}).code == 2);
}

TEST_CASE("batch") {
  const auto f = scratch("batch.json");
  write(f, R"({"jobs": [{"degree": 5, "continuity": 1, "elements": 10},
                        {"degree": 7, "continuity": 0, "elements": 11},
                        {"degree": 5, "continuity": 0, "elements": 4}]})");
  const auto r = run({"batch", f.string()});
  CHECK(r.code == 1);
  const auto j = json::parse(r.out);
  REQUIRE(j["results"].size() == 3);
  CHECK(j["results"][0]["nodes"].size() == 21);
  CHECK(j["results"][1]["nodes"].size() == 39);
  CHECK(j["results"][2]["error"] == "parity");
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"rule", "-d", "9", "-c", "1", "-N", "20"};
  const auto a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("documents survive a round trip") {
  const auto r = run({"rule", "-d", "7", "-c", "3", "-N", "8"});
  REQUIRE(r.code == 0);
  const auto doc = splinequad::document_from_json(json::parse(r.out));
  CHECK(splinequad::to_json(doc).dump(2) + "\n" == r.out);
  CHECK_THROWS_AS(splinequad::document_from_json(json{{"schema_version", 99}}),
                  std::invalid_argument);
}

TEST_CASE("tolerance from the environment") {
  ::setenv("SPLINEQUAD_TOLERANCE", "1e-30", 1);
  CHECK(splinequad::cli::default_tolerance() == 1e-30);
  CHECK(run({"rule", "-d", "5", "-c", "1", "-N", "10"}).code == 1);
  CHECK(run({"--tol", "1e-12", "rule", "-d", "5", "-c", "1", "-N", "10"}).code == 0);
  ::setenv("SPLINEQUAD_TOLERANCE", "banana", 1);
  CHECK(run({"rule", "-d", "5", "-c", "1", "-N", "10"}).code == 2);
  ::unsetenv("SPLINEQUAD_TOLERANCE");
  CHECK(splinequad::cli::default_tolerance() == 1e-12);
}
