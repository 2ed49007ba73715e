#include <doctest.h>

#include "percsim/scenario.hpp"

#include <filesystem>
#include <string>

using namespace percsim;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarios{PERCSIM_SCENARIO_DIR};

json minimal() {
  return json::parse(R"({
    "name": "mini",
    "objects": [{"class_id": 80, "width": 0.5, "height": 0.4, "position": [0, 0, 0.2]}],
    "robots": [{"id": 1, "position": [-1.4, 0.2, 0.6], "target": [-1.5, 0]},
               {"id": 2, "position": [-2.6, -0.2, 0.6], "target": [-2.4, 0]}]
  })");
}

}  // namespace

TEST_CASE("minimal scenario takes defaults") {
  const ScenarioConfig cfg = parse_scenario(minimal());
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.horizon == 1000);
  CHECK(cfg.robots.size() == 2);
  CHECK(cfg.robot(2).target.x() == -2.4);
  CHECK(cfg.target_object().class_id == 80);
  CHECK(cfg.attacks.empty());
  CHECK(describe_attacks(cfg) == "none");
  CHECK(cfg.build_topology().neighbors(1, 0) == std::vector<RobotId>{2});
}

TEST_CASE("unknown keys are rejected") {
  json j = minimal();
  j["horizn"] = 10;
  CHECK_THROWS_AS(parse_scenario(j), ConfigError);
  j = minimal();
  j["robots"][0]["velocty"] = {0, 0, 0};
  CHECK_THROWS_AS(parse_scenario(j), ConfigError);
}

TEST_CASE("malformed values are rejected") {
  CHECK_THROWS_AS(parse_scenario_text("{ not json"), ConfigError);
  json j = minimal();
  j["robots"][0]["position"] = {1, 2};
  CHECK_THROWS_AS(parse_scenario(j), ConfigError);
  j = minimal();
  j["horizon"] = "long";
  CHECK_THROWS_AS(parse_scenario(j), ConfigError);
  CHECK_THROWS_AS(load_scenario(kScenarios / "does_not_exist.json"), ConfigError);
}

TEST_CASE("semantic validation") {
  auto invalid = [](auto&& edit) {
    json j = minimal();
    edit(j);
    return parse_scenario(j);
  };
  CHECK_THROWS_AS(invalid([](json& j) { j["horizon"] = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](json& j) { j["robots"][1]["id"] = 1; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](json& j) { j["metrics"] = {{"robot", 7}}; }).validate(), ConfigError);
  CHECK_THROWS_AS(
      invalid([](json& j) { j["attacks"] = {{{"target_robot", 9}}}; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](json& j) {
                    j["attacks"] = {{{"target_robot", 2}, {"misclassification", {{"n_blocks", 10}, {"p", 0.5}, {"decoy_class", 80}}}}};
                  }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(invalid([](json& j) {
                    j["attacks"] = {{{"target_robot", 2}, {"misclassification", {{"n_blocks", 2000}, {"p", 0.5}}}}};
                  }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(invalid([](json& j) {
                    j["attacks"] = {{{"target_robot", 2}}, {{"target_robot", 2}}};
                  }).validate(),
                  ConfigError);
  CHECK_THROWS_AS(invalid([](json& j) { j["network"] = {{"loss", 1.2}}; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](json& j) { j["target_class"] = 3; }).validate(), ConfigError);
}

TEST_CASE("topology phases") {
  json j = minimal();
  j["network"] = {{"topology", {{{"from_step", 0}, {"adjacency", {{0, 1}, {1, 0}}}},
                                {{"from_step", 100}, {"adjacency", {{0, 0}, {0, 0}}}}}}};
  const ScenarioConfig cfg = parse_scenario(j);
  CHECK_NOTHROW(cfg.validate());
  const Topology t = cfg.build_topology();
  CHECK(t.weight(1, 2, 99) == 1);
  CHECK(t.weight(1, 2, 100) == 0);
  j["network"]["topology"][0]["adjacency"] = {{0, 1, 0}, {1, 0, 1}};
  CHECK_THROWS_AS(parse_scenario(j), ConfigError);
}

TEST_CASE("to_json round trips") {
  for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
    const ScenarioConfig cfg = load_scenario(entry.path());
    const json once = to_json(cfg);
    CHECK(to_json(parse_scenario(once)) == once);
  }
}

TEST_CASE("shipped scenarios") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const ScenarioConfig cfg = load_scenario(entry.path());
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.name == entry.path().stem().string());
    CHECK(cfg.horizon == 1000);
  }
  CHECK(count == 16);

  const ScenarioConfig mixed = load_scenario(kScenarios / "exp16_mixed_n200_p20_b5_q75.json");
  CHECK(describe_attacks(mixed) == "R2: n=200 p=0.2; b=5 q=75%");
  const AttackSpec* a = mixed.attack_for(2);
  REQUIRE(a);
  CHECK(a->misclass->n_blocks == 200);
  CHECK(a->misloc->q == 0.75);
  CHECK(mixed.attack_for(1) == nullptr);
}
