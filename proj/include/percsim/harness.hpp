#pragma once

#include "percsim/observability.hpp"
#include "percsim/scenario.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace percsim {

/// What the odometry oracle reports: velocity and attitude, never position.
struct VioSample {
  Vec3 velocity = Vec3::Zero();
  Rotation3 rotation;  // world_from_body
};

/// Body attitude of the reduced-order model: level, heading = yaw.
Rotation3 body_attitude(const RobotPhysState& s);

VioSample vio_oracle(const RobotPhysState& truth, const VioNoise& noise, Rng& rng);

/// Which candidate the associator picked in a frame.
enum class Selection : int { None = -1, Injected = 0, Nominal = 1 };

/// One robot at one step.
struct TickRecord {
  int step = 0;
  RobotId robot = 0;
  double t = 0.0;     // frame time t_k (robot-local simulated clock)
  double T_s = 0.0;   // t_{k+1} - t_k, from the frame latency
  int m = 0;          // boxes emitted by the (possibly attacked) detector
  int candidates = 0;  // position candidates after class/confidence filtering
  int nominal_candidates = 0;
  int beta = 0;       // 1 = position measurement missed
  Selection selected = Selection::None;
  Vec6 x_hat = Vec6::Zero();
  Mat6 P = Mat6::Zero();
  double P_norm = 0.0;
  double trace_w_ad = 0.0;
  double trace_w_sd = 0.0;
  double obs_ratio = 1.0;
  Vec3 true_p = Vec3::Zero();
  Vec3 true_v = Vec3::Zero();
  Vec2 u = Vec2::Zero();
  Vec2 u_a = Vec2::Zero();  // adversarial control-channel term implied by estimation errors
  double formation_error = 0.0;  // true, x-y, mean over the other robots
  /// (p^_robot - p^_reference) - (p*_robot - p*_reference) as seen by this robot, for the scored pair.
  std::optional<Vec2> pair_error;
  int stale_neighbors = 0;
  int gate_singular = 0;
};

struct RunSummary {
  std::optional<double> rms_formation;                 // scored robot's view, t >= rms_start_time
  std::optional<double> rms_formation_reference_view;  // the reference robot's view of the same pair
  double sup_cov_norm = 0.0;
  double sum_cov_norm = 0.0;
  double missed_fraction = 0.0;
  double mean_latency = 0.0;
  double final_obs_ratio = 1.0;
  std::optional<double> nominal_selection_rate;  // frames with a nominal candidate in which it was picked
  double max_formation_error = 0.0;              // true, scored robot, t >= rms_start_time
  int steps = 0;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<TickRecord> records;
  RunSummary summary;
  bool aborted = false;
  std::string diagnostic;
};

/// Runs the full per-robot pipeline for cfg.horizon steps. Deterministic in cfg (including seed).
/// A numerical failure stops the run early with aborted = true.
RunResult run_scenario(const ScenarioConfig& cfg);

RunSummary compute_summary(const std::vector<TickRecord>& records, const MetricsConfig& metrics);

struct MetricStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;  // seeds for which the metric was available
};

struct SweepRow {
  double value = 0.0;
  int seeds = 0;
  int aborted = 0;
  std::map<std::string, MetricStats> metrics;
};

/// Sweepable axes: "p", "n_blocks", "b", "q", "seed" (alias "seeds"). The attack axes act on the
/// metrics robot's attack spec.
void apply_axis(ScenarioConfig& cfg, std::string_view axis, double value);

std::vector<SweepRow> sweep(const ScenarioConfig& base, std::string_view axis, const std::vector<double>& values,
                            int seeds);

nlohmann::json sweep_to_json(std::string_view axis, const std::vector<SweepRow>& rows);
std::string sweep_table(std::string_view axis, const std::vector<SweepRow>& rows);

/// Summary + config echo + seed; dump(2) of this is byte-stable for a given config.
nlohmann::json summary_to_json(const RunResult& result);
void write_ticks_csv(const std::vector<TickRecord>& records, std::ostream& out);

/// Table-shaped text report of every *.summary.json in a directory, sorted by file name.
std::string report_directory(const std::filesystem::path& dir);

}  // namespace percsim
