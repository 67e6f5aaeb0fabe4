#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qmms/common.hpp"
#include "qmms/examples.hpp"
#include "qmms/io.hpp"
#include "qmms/space.hpp"
#include "test_helpers.hpp"

using namespace qmms;
using qmms_test::random_space;

TEST_CASE("space JSON round trip is exact") {
  Rng rng(127);
  const FiniteQMMSpace space = random_space(rng, 7, 0.2, 3.0);
  const io::json j = io::space_to_json(space);
  const FiniteQMMSpace back = io::space_from_json(j);
  CHECK(back.dist_matrix() == space.dist_matrix());
  CHECK(back.weights() == space.weights());
  CHECK(back.point_ids() == space.point_ids());
}

TEST_CASE("generator card rides along with the space") {
  const GeneratedSpace gen = generate("discrete_N", {{"n", 12.0}});
  const io::json j = io::space_to_json(gen.space, &gen.card);
  REQUIRE(j.contains("generator"));
  CHECK(j["generator"]["name"] == "discrete_N");
  CHECK(j["generator"]["params"]["n"] == 12.0);
  REQUIRE(j["generator"]["reference_bounds"].is_array());
  CHECK(j["generator"]["reference_bounds"].size() == gen.card.bounds.size());
  // Round trip still validates (the card is advisory).
  const FiniteQMMSpace back = io::space_from_json(j);
  CHECK(back.size() == 12);
}

TEST_CASE("function parsing accepts both layouts") {
  CHECK(io::function_from_json(io::json::array({1.0, 2.0, 3.0})) ==
        std::vector<double>{1.0, 2.0, 3.0});
  io::json obj;
  obj["u"] = {0.5, -1.0};
  CHECK(io::function_from_json(obj) == std::vector<double>{0.5, -1.0});
  io::json bad;
  bad["v"] = {1.0};
  CHECK_THROWS_AS(io::function_from_json(bad), ValidationError);
}

TEST_CASE("malformed space files raise typed errors") {
  Rng rng(131);
  const FiniteQMMSpace space = random_space(rng, 3);
  io::json j = io::space_to_json(space);
  j["dist"][0][0] = 1.0;
  try {
    io::space_from_json(j);
    FAIL_CHECK("expected a validation error");
  } catch (const ValidationError& err) {
    CHECK(err.kind() == ValidationError::Kind::NonzeroDiagonal);
  }
  io::json shape = io::space_to_json(space);
  shape["dist"].erase(2);
  CHECK_THROWS_AS(io::space_from_json(shape), ValidationError);
}

TEST_CASE("double formatting round trips") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(-2.0) == "-2");
  Rng rng(137);
  std::uniform_real_distribution<double> dv(-1e6, 1e6);
  for (int rep = 0; rep < 200; ++rep) {
    const double v = dv(rng);
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("CSV and JSON files round trip on disk") {
  const std::string csv_path = "qmms_test_io.csv";
  io::write_csv(csv_path, {"a", "b"}, {{1.0, 0.25}, {-3.0, 1e-9}});
  std::ifstream in(csv_path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  std::getline(in, line);
  CHECK(line == "1,0.25");
  std::getline(in, line);
  CHECK(line == "-3,1e-09");
  in.close();
  std::remove(csv_path.c_str());

  const std::string json_path = "qmms_test_io.json";
  io::json doc;
  doc["alpha"] = 0.5;
  doc["values"] = {1.0, 2.0};
  io::write_json(json_path, doc);
  CHECK(io::read_json(json_path) == doc);
  std::remove(json_path.c_str());

  const std::string manifest_path = "qmms_test_manifest.json";
  io::write_manifest(manifest_path, "diag doubling", 7, {{"c", 2.0}}, {{"total", 12.5}});
  const io::json manifest = io::read_json(manifest_path);
  CHECK(manifest["command"] == "diag doubling");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["params"]["c"] == 2.0);
  CHECK(manifest["timings_ms"]["total"] == 12.5);
  std::remove(manifest_path.c_str());
}
