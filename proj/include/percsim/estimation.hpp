#pragma once

#include "percsim/geometry.hpp"

#include <optional>
#include <span>
#include <vector>

namespace percsim {

/// Six-state relative-position / relative-velocity estimate.
/// x = (p, v): p is the robot position relative to the landmark, v the robot velocity
/// minus the shared reference velocity.
struct FilterState {
  Vec6 x = Vec6::Zero();
  Mat6 P = Mat6::Identity();
  int k = 0;
  double t = 0.0;
  /// False until the first position measurement has been fused.
  bool has_position_fix = false;

  Vec3 position() const { return x.head<3>(); }
  Vec3 velocity() const { return x.tail<3>(); }
};

struct FilterParams {
  double sigma2_pos = 0.05;
  double sigma2_vel = 0.04;
  Mat3 r_vel = 0.078 * Mat3::Identity();
  LocalizationUncertainty localization;
  double gate_tau = 2.4476;
  double init_pos_var = 1.0;
  double init_vel_var = 0.05;
  /// Until the first fix, skip the gate and fuse the medoid candidate (the prior mean of
  /// zero sits at the landmark, far outside any gate).
  bool track_initiation = true;

  void validate() const;
};

/// x = 0, P = diag(init_pos_var I3, init_vel_var I3).
FilterState initial_state(const FilterParams& params);

/// x <- F x + [T_s * reference_velocity; 0],  P <- F P F' + Q.
/// reference_velocity carries the known shared reference motion, since the position state is
/// absolute while the velocity state is relative to the reference.
FilterState predict(const FilterState& fs, double T_s, const FilterParams& params,
                    const Vec3& reference_velocity = Vec3::Zero());

/// S = C_pos P C_pos' + R(candidate).
Mat3 innovation_covariance(const FilterState& fs, const RelPosMeasurement& m);

struct GateResult {
  std::vector<std::size_t> admitted;  // indices into the candidate list, ascending
  std::vector<double> distance2;      // squared Mahalanobis distance per candidate (NaN when singular)
  int singular_rejections = 0;
  int beta = 1;  // 1 = position measurement missed
};

/// Admits candidates whose squared Mahalanobis distance to the predicted position is <= tau^2.
/// Candidates with an ill-conditioned S (condition number > 1e12) are rejected and counted.
GateResult gate(std::span<const RelPosMeasurement> candidates, const FilterState& fs, const FilterParams& params);

inline constexpr double kMaxInnovationCondition = 1e12;

/// Index (into candidates) of the admitted candidate with minimum Mahalanobis distance.
/// Ties go to the lowest index.
std::size_t associate(std::span<const RelPosMeasurement> candidates, std::span<const std::size_t> admissible,
                      const FilterState& fs);

/// First fix of a track, before any position has been fused: the candidate with the smallest
/// summed Euclidean distance to all others. Ties go to the lowest index. Requires a non-empty list.
std::size_t initiate_track(std::span<const RelPosMeasurement> candidates);

/// Sequential correction: the position stage only when a measurement was associated,
/// the velocity stage always. P is re-symmetrized afterwards.
FilterState update(const FilterState& predicted, const Vec3& y_vel, const std::optional<RelPosMeasurement>& y_pos,
                   const FilterParams& params);

/// Induced 2-norm of a symmetric PSD matrix.
double induced_norm(const Mat6& P);

}  // namespace percsim
