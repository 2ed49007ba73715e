#pragma once

#include "percsim/perception.hpp"
#include "percsim/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace percsim {

/// Misclassification campaign: the horizon is cut into n_blocks equal runs of
/// ceil(horizon / n_blocks) steps and each run is attacked independently with probability p.
/// n_blocks == horizon is a per-step Bernoulli attack; fewer blocks mean longer outages.
struct MisclassSpec {
  int n_blocks = 1;
  double p = 0.0;
  ClassId decoy_class = 4;

  void validate(int horizon_steps) const;
};

class MisclassSchedule {
 public:
  MisclassSchedule(const MisclassSpec& spec, int horizon_steps, Rng rng);

  /// Block outcomes are drawn in block order on first use, so the realization does not depend
  /// on query order.
  bool attacked(int step);
  int block_length() const { return block_len_; }
  int block_of(int step) const { return step / block_len_; }
  const MisclassSpec& spec() const { return spec_; }
  int horizon() const { return horizon_; }

 private:
  MisclassSpec spec_;
  int horizon_;
  int block_len_;
  Rng rng_;
  std::vector<std::int8_t> realized_;  // -1 = not drawn yet
};

/// Spurious-box injector: b perturbed copies of each nominal target box.
struct MislocSpec {
  int b = 0;
  double q = 0.0;           // corner scale factors are drawn from U[1 - q, 1 + q]
  double conf_boost = 0.10;  // additive, clamped to 1
  int max_redraws = 10;

  void validate() const;
};

struct MislocStats {
  int injected = 0;
  int skipped = 0;  // degenerate after max_redraws attempts
};

/// Per-frame processing cost; latency grows with the number of boxes the detector emits.
struct OverloadModel {
  double base_cost = 0.034;
  double per_box_cost = 0.001;

  void validate() const;
};

struct AttackSpec {
  RobotId target_robot = 0;
  std::optional<MisclassSpec> misclass;
  std::optional<MislocSpec> misloc;
  std::optional<OverloadModel> overload;
  /// Constant control-channel perturbation added to the consensus command (m/s^2).
  std::optional<Vec2> synthetic_ua;
};

/// Relabels every detection of target_class to the decoy class when step k is attacked.
DetectionSet apply_misclassification(const DetectionSet& ds, MisclassSchedule& sched, int step,
                                     ClassId target_class);

/// Appends spec.b spurious boxes per nominal target detection. Nominal detections are kept.
DetectionSet apply_mislocalization(const DetectionSet& ds, const MislocSpec& spec, ClassId target_class,
                                   const CameraIntrinsics& intr, Rng& rng, MislocStats* stats = nullptr);

/// base_cost + m * per_box_cost (seconds).
double frame_latency(std::size_t m, const OverloadModel& ov);

/// Frame latency floored at the minimum sampling period.
double next_period(std::size_t m, const OverloadModel& ov, double min_period);

/// Detection-level distance between two matched detections: infinity on class mismatch,
/// else the L2 norm of the corner difference (px).
double detection_distance(const Detection& a, const Detection& b);

std::vector<double> detection_distance(const DetectionSet& s1, const DetectionSet& s2,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs);

}  // namespace percsim
