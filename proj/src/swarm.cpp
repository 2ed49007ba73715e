#include "percsim/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace percsim {

Vec2 ReferenceProfile::velocity(int k) const {
  const double w = 2.0 * std::numbers::pi / period_steps;
  return {0.0, 2.0 * std::numbers::pi * freq * std::cos(w * k)};
}

Vec2 ReferenceProfile::acceleration(int k) const {
  const double w = 2.0 * std::numbers::pi / period_steps;
  return {0.0, -2.0 * std::numbers::pi * freq * w * std::sin(w * k) / nominal_period};
}

void ControlParams::validate() const {
  if (!(alpha > 0.0) || !(gamma > 0.0)) throw ConfigError("control gains must be > 0");
  if (reference.period_steps < 1) throw ConfigError("reference period must be >= 1 step");
  if (!(reference.nominal_period > 0.0)) throw ConfigError("nominal period must be > 0");
  if (!std::isfinite(reference.freq)) throw ConfigError("reference frequency must be finite");
}

Vec2 consensus_control(const Vec2& p_tilde, const Vec2& v_tilde, std::span<const NeighborTerm> neighbors,
                       const ControlParams& params, const Vec2& v_ref_dot, const Vec2& u_a) {
  Vec2 disagreement = Vec2::Zero();
  for (const NeighborTerm& n : neighbors) disagreement += n.weight * (p_tilde - n.p_tilde);
  return -params.alpha * disagreement - params.gamma * v_tilde + v_ref_dot + u_a;
}

RobotPhysState step_dynamics(const RobotPhysState& s, const Vec2& u, double T_s, const AltitudeHold& alt) {
  if (!(T_s > 0.0)) throw std::invalid_argument("sampling period must be > 0");
  RobotPhysState out = s;
  const double w = alt.omega;
  const double a_z = w * w * (alt.altitude - s.p.z()) - 2.0 * w * s.v.z();
  out.v += Vec3(u.x(), u.y(), a_z) * T_s;
  out.p += out.v * T_s;
  return out;
}

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

RobotPhysState step_yaw(const RobotPhysState& s, double target_yaw, double gain, double T_s) {
  RobotPhysState out = s;
  const double step = std::clamp(gain * T_s, 0.0, 1.0);
  out.yaw = wrap_angle(s.yaw + step * wrap_angle(target_yaw - s.yaw));
  return out;
}

Mat2 yaw_matrix(double yaw, YawMatrix convention) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat2 m;
  if (convention == YawMatrix::Corrected)
    m << c, s, s, -c;
  else
    m << c, s, c, -c;
  return m;
}

Vec2 attitude_map(const Vec2& u, double yaw, YawMatrix convention) {
  const Mat2 R = yaw_matrix(yaw, convention);
  if (std::abs(R.determinant()) < 1e-12) throw std::domain_error("yaw matrix is singular at this heading");
  return R.inverse() * u / kGravity;
}

double formation_error(const Vec2& p_i, const Vec2& p_j, const Vec2& target_i, const Vec2& target_j) {
  return ((p_i - p_j) - (target_i - target_j)).norm();
}

Topology::Topology(std::vector<RobotId> ids, Eigen::MatrixXi adjacency) : ids_(std::move(ids)) {
  add_phase(0, std::move(adjacency));
}

void Topology::add_phase(int from_step, Eigen::MatrixXi adjacency) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (adjacency.rows() != n || adjacency.cols() != n) throw ConfigError("adjacency matrix size must match robot count");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0) throw ConfigError("adjacency diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j)
      if (adjacency(i, j) != 0 && adjacency(i, j) != 1) throw ConfigError("adjacency entries must be 0 or 1");
  }
  if (!phases_.empty() && from_step <= phases_.back().first)
    throw ConfigError("topology phases must have increasing start steps");
  if (phases_.empty() && from_step != 0) throw ConfigError("first topology phase must start at step 0");
  phases_.emplace_back(from_step, std::move(adjacency));
}

int Topology::index_of(RobotId id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw std::out_of_range("unknown robot id in topology");
  return static_cast<int>(it - ids_.begin());
}

int Topology::weight(RobotId i, RobotId j, int step) const {
  if (phases_.empty()) return 0;
  auto it = std::upper_bound(phases_.begin(), phases_.end(), step,
                             [](int s, const auto& phase) { return s < phase.first; });
  if (it != phases_.begin()) --it;
  return it->second(index_of(i), index_of(j));
}

std::vector<RobotId> Topology::neighbors(RobotId i, int step) const {
  std::vector<RobotId> out;
  for (RobotId j : ids_)
    if (j != i && weight(i, j, step) != 0) out.push_back(j);
  return out;
}

Topology Topology::complete(std::vector<RobotId> ids) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXi a = Eigen::MatrixXi::Ones(n, n);
  a.diagonal().setZero();
  return Topology(std::move(ids), a);
}

Topology Topology::disconnected(std::vector<RobotId> ids) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  return Topology(std::move(ids), Eigen::MatrixXi::Zero(n, n));
}

void NetworkParams::validate() const {
  if (!(loss >= 0.0 && loss <= 1.0)) throw ConfigError("network loss must lie in [0, 1]");
  if (delay_steps < 0) throw ConfigError("network delay must be >= 0");
}

void network_send(MessageQueue& queue, NeighborMessage msg, const NetworkParams& params) {
  msg.delivery_step = msg.send_step + params.delay_steps;
  queue.pending.push_back(msg);
}

std::vector<NeighborMessage> network_deliver(MessageQueue& queue, int current_step, const NetworkParams& params,
                                             Rng& rng) {
  std::bernoulli_distribution lost(params.loss);
  std::vector<NeighborMessage> delivered;
  std::vector<NeighborMessage> waiting;
  for (const NeighborMessage& m : queue.pending) {
    if (m.delivery_step > current_step) {
      waiting.push_back(m);
      continue;
    }
    if (!lost(rng)) delivered.push_back(m);
  }
  queue.pending = std::move(waiting);
  return delivered;
}

void NeighborTable::receive(const NeighborMessage& msg) {
  auto it = latest_.find(msg.sender);
  if (it == latest_.end() || it->second.send_step <= msg.send_step) latest_[msg.sender] = msg;
}

std::optional<NeighborMessage> NeighborTable::latest(RobotId sender) const {
  auto it = latest_.find(sender);
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

}  // namespace percsim
