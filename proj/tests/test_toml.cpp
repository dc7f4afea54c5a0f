#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "cbf2d/toml.hpp"

using namespace cbf2d;
using toml::Value;

TEST_CASE("scalar values and comments") {
  const auto doc = toml::parse(R"(
# leading comment
answer = 42        # trailing comment
ratio = -0.5
exp = 1.5e-3
flag = true
off = false
name = "hello \"quoted\" \n world"
)",
                               "test");
  CHECK(toml::require_number(doc, "answer", "test") == 42.0);
  CHECK(toml::require_number(doc, "ratio", "test") == -0.5);
  CHECK(toml::require_number(doc, "exp", "test") == doctest::Approx(1.5e-3));
  CHECK(toml::get_bool(doc, "flag", false));
  CHECK_FALSE(toml::get_bool(doc, "off", true));
  CHECK(toml::require_string(doc, "name", "test") ==
        "hello \"quoted\" \n world");
}

TEST_CASE("fallback helpers") {
  const auto doc = toml::parse("x = 1.0", "test");
  CHECK(toml::get_number(doc, "x", 9.0) == 1.0);
  CHECK(toml::get_number(doc, "missing", 9.0) == 9.0);
  CHECK(toml::get_string(doc, "missing", "d") == "d");
  CHECK(toml::find(doc, "missing") == nullptr);
  CHECK_THROWS_AS(toml::require_number(doc, "missing", "test"),
                  ScenarioError);
}

TEST_CASE("tables and dotted headers") {
  const auto doc = toml::parse(R"(
top = 1.0
[robot]
speed = 2.0
[robot.limits]
max = 3.0
[lidar]
beams = 720
)",
                               "test");
  const auto& robot = toml::find(doc, "robot")->as_table("robot");
  CHECK(toml::require_number(robot, "speed", "robot") == 2.0);
  const auto& limits = toml::find(robot, "limits")->as_table("limits");
  CHECK(toml::require_number(limits, "max", "limits") == 3.0);
  CHECK(toml::require_number(toml::find(doc, "lidar")->as_table("lidar"),
                             "beams", "lidar") == 720.0);
}

TEST_CASE("arrays, nested and multiline") {
  const auto doc = toml::parse(R"(
flat = [1.0, 2.0, 3.0]
pairs = [[0.0, 1.0], [2.0, 3.0]]
multi = [
  [0.0, 0.0],   # first corner
  [4.0, 0.0],
  [4.0, 2.0],
]
)",
                               "test");
  const auto& flat = toml::require_array(doc, "flat", "test");
  REQUIRE(flat.size() == 3);
  CHECK(flat[1].as_number("flat") == 2.0);

  const auto& pairs = toml::require_array(doc, "pairs", "test");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1].as_array("pairs")[0].as_number("pairs") == 2.0);

  const auto& multi = toml::require_array(doc, "multi", "test");
  REQUIRE(multi.size() == 3);
  CHECK(multi[2].as_array("multi")[0].as_number("multi") == 4.0);
}

TEST_CASE("arrays of tables, including nested under the last element") {
  const auto doc = toml::parse(R"(
[[dynamic]]
name = "chair"
[[dynamic.knots]]
t = 0.0
[[dynamic.knots]]
t = 5.0
[[dynamic]]
name = "door"
[[dynamic.knots]]
t = 1.0
)",
                               "test");
  const auto& dynamic = toml::require_array(doc, "dynamic", "test");
  REQUIRE(dynamic.size() == 2);

  const auto& chair = dynamic[0].as_table("dynamic");
  CHECK(toml::require_string(chair, "name", "chair") == "chair");
  const auto& chair_knots = toml::require_array(chair, "knots", "chair");
  REQUIRE(chair_knots.size() == 2);
  CHECK(toml::require_number(chair_knots[1].as_table("knots"), "t", "knots") ==
        5.0);

  const auto& door = dynamic[1].as_table("dynamic");
  const auto& door_knots = toml::require_array(door, "knots", "door");
  REQUIRE(door_knots.size() == 1);
  CHECK(toml::require_number(door_knots[0].as_table("knots"), "t", "knots") ==
        1.0);
}

TEST_CASE("type accessors complain with context") {
  const auto doc = toml::parse("x = 1.0", "test");
  CHECK_THROWS_AS(toml::find(doc, "x")->as_string("x"), ScenarioError);
  CHECK_THROWS_AS(toml::find(doc, "x")->as_array("x"), ScenarioError);
  CHECK_THROWS_AS(toml::find(doc, "x")->as_table("x"), ScenarioError);
  try {
    toml::find(doc, "x")->as_table("the-context-marker");
    FAIL("expected a throw");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("the-context-marker") !=
          std::string::npos);
  }
}

TEST_CASE("parse errors carry the source name and line") {
  const auto expect_throw = [](const std::string& text) {
    CHECK_THROWS_AS(toml::parse(text, "bad.toml"), ScenarioError);
  };
  expect_throw("x = ");
  expect_throw("x = 1.0\nx = 2.0");         // duplicate key
  expect_throw("x = nope");                 // not a literal
  expect_throw("x = \"unterminated");
  expect_throw("[table");                   // unclosed header
  expect_throw("x = [1.0, 2.0");            // unclosed array
  expect_throw("= 3.0");                    // missing key
  expect_throw("x = 1.0 trailing");

  try {
    toml::parse("ok = 1.0\nbad = zzz", "bad.toml");
    FAIL("expected a throw");
  } catch (const ScenarioError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.toml") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);  // the offending line
  }
}

TEST_CASE("duplicate table headers are rejected") {
  CHECK_THROWS_AS(toml::parse("[a]\nx = 1.0\n[a]\ny = 2.0", "test"),
                  ScenarioError);
}

TEST_CASE("missing files throw rather than return") {
  CHECK_THROWS_AS(toml::parse_file("/nonexistent/definitely_absent.toml"),
                  ScenarioError);
}
