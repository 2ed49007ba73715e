#pragma once

#include "percsim/adversary.hpp"
#include "percsim/estimation.hpp"
#include "percsim/perception.hpp"
#include "percsim/swarm.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace percsim {

struct RobotConfig {
  RobotId id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
  Vec2 target = Vec2::Zero();  // formation offset p*_i in the x-y plane
  double camera_tilt = 0.0;    // downward pitch of the forward camera mount, rad
};

/// Noise of the odometry oracle, which reports velocity and attitude but never position.
struct VioNoise {
  double velocity_std = 0.05;  // m/s per axis
  double rotation_std = 0.005;  // rad per axis (small-angle perturbation)
};

struct TimingConfig {
  OverloadModel cost;
  double min_period = 0.02;
};

struct MetricsConfig {
  RobotId robot = 2;      // attacked robot whose filter is scored
  RobotId reference = 1;  // neighbor in the scored pair p_21 = p_robot - p_reference
  double rms_start_time = 10.0;
};

struct TopologyPhase {
  int from_step = 0;
  Eigen::MatrixXi adjacency;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string description;
  int horizon = 1000;
  std::uint64_t seed = 1;

  CameraIntrinsics camera;
  std::vector<ObjectModel> objects;
  ClassId target_class = 80;
  DetectorParams detector;
  FilterParams filter;
  ControlParams control;
  AltitudeHold altitude;
  double yaw_gain = 4.0;
  VioNoise vio;
  TimingConfig timing;
  NetworkParams network;
  /// Empty means a complete graph.
  std::vector<TopologyPhase> topology;
  std::vector<RobotConfig> robots;
  std::vector<AttackSpec> attacks;
  MetricsConfig metrics;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;

  const RobotConfig& robot(RobotId id) const;
  const ObjectModel& target_object() const;
  Topology build_topology() const;
  const AttackSpec* attack_for(RobotId id) const;
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig parse_scenario_text(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Short human-readable description of the adversary, e.g. "n=200 p=0.4; b=5 q=75%".
std::string describe_attacks(const ScenarioConfig& cfg);

}  // namespace percsim
