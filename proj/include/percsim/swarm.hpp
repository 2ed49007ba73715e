#pragma once

#include "percsim/rng.hpp"
#include "percsim/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace percsim {

inline constexpr double kGravity = 9.81;

struct RobotPhysState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double yaw = 0.0;
};

/// Shared reference velocity v_ref(k) = [0, 2 pi f cos(2 pi k / period)], indexed by iteration.
struct ReferenceProfile {
  double freq = 0.1;
  int period_steps = 500;
  double nominal_period = 0.035;  // seconds per iteration, converts d/dk into d/dt

  Vec2 velocity(int k) const;
  Vec2 acceleration(int k) const;
};

struct ControlParams {
  double alpha = 0.72828;
  double gamma = 1.09242;
  ReferenceProfile reference;

  void validate() const;
};

/// One neighbor's contribution: adjacency weight a_ij and its last known position error.
struct NeighborTerm {
  double weight = 1.0;
  Vec2 p_tilde = Vec2::Zero();
};

/// u* = -alpha sum_j a_ij (p~_i - p~_j) - gamma v~_i + dv_ref + u_a   (x-y plane)
Vec2 consensus_control(const Vec2& p_tilde, const Vec2& v_tilde, std::span<const NeighborTerm> neighbors,
                       const ControlParams& params, const Vec2& v_ref_dot, const Vec2& u_a = Vec2::Zero());

/// Critically damped altitude hold: a_z = w^2 (z* - z) - 2 w v_z.
struct AltitudeHold {
  double altitude = 0.6;
  double omega = 2.0;
};

/// Semi-implicit Euler on the planar double integrator (v first, then p), altitude via the
/// regulator. Yaw is left untouched.
RobotPhysState step_dynamics(const RobotPhysState& s, const Vec2& u, double T_s, const AltitudeHold& alt);

/// First-order yaw regulator towards target_yaw, shortest way round.
RobotPhysState step_yaw(const RobotPhysState& s, double target_yaw, double gain, double T_s);

double wrap_angle(double a);

enum class YawMatrix {
  /// [[cos, sin], [sin, -cos]]: an involution, invertible for every yaw.
  Corrected,
  /// [[cos, sin], [cos, -cos]] taken literally; singular where cos(psi)(cos(psi) + sin(psi)) = 0.
  Literal,
};

Mat2 yaw_matrix(double yaw, YawMatrix convention);

/// (d_theta*, d_phi*) = R(psi*)^-1 u* / g. Diagnostic only; dynamics integrate u* directly.
/// Throws std::domain_error when the chosen matrix is singular at this yaw.
Vec2 attitude_map(const Vec2& u, double yaw, YawMatrix convention = YawMatrix::Corrected);

/// ||(p_i - p_j) - (p*_i - p*_j)|| in the x-y plane.
double formation_error(const Vec2& p_i, const Vec2& p_j, const Vec2& target_i, const Vec2& target_j);

/// Time-switched communication graph a_ij^sigma(k).
class Topology {
 public:
  Topology() = default;
  /// Robots in `ids` order index the matrix rows/columns.
  Topology(std::vector<RobotId> ids, Eigen::MatrixXi adjacency);

  /// Switches to `adjacency` from step `from_step` onwards. Steps must be added in increasing order.
  void add_phase(int from_step, Eigen::MatrixXi adjacency);

  int weight(RobotId i, RobotId j, int step) const;
  std::vector<RobotId> neighbors(RobotId i, int step) const;
  const std::vector<RobotId>& ids() const { return ids_; }
  std::size_t phase_count() const { return phases_.size(); }

  static Topology complete(std::vector<RobotId> ids);
  static Topology disconnected(std::vector<RobotId> ids);

 private:
  int index_of(RobotId id) const;
  std::vector<RobotId> ids_;
  std::vector<std::pair<int, Eigen::MatrixXi>> phases_;
};

struct NeighborMessage {
  RobotId sender = 0;
  RobotId receiver = 0;
  Vec2 p_tilde = Vec2::Zero();
  int send_step = 0;
  int delivery_step = 0;
};

struct NetworkParams {
  double loss = 0.0;
  int delay_steps = 0;

  void validate() const;
};

/// Pending messages, in send order.
struct MessageQueue {
  std::vector<NeighborMessage> pending;
};

/// Queues a message on its link; delivery_step = send_step + delay.
void network_send(MessageQueue& queue, NeighborMessage msg, const NetworkParams& params);

/// Removes every message due at current_step. Each one is independently lost with
/// probability params.loss; the rest are returned in send order.
std::vector<NeighborMessage> network_deliver(MessageQueue& queue, int current_step, const NetworkParams& params,
                                             Rng& rng);

/// Zero-order hold of the latest neighbor information received by one robot.
class NeighborTable {
 public:
  void receive(const NeighborMessage& msg);
  std::optional<NeighborMessage> latest(RobotId sender) const;

 private:
  std::map<RobotId, NeighborMessage> latest_;
};

}  // namespace percsim
