#include "percsim/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace percsim {

void FilterParams::validate() const {
  if (!(sigma2_pos > 0.0) || !(sigma2_vel > 0.0)) throw ConfigError("process noise variances must be > 0");
  if (!r_vel.allFinite() || r_vel.ldlt().info() != Eigen::Success || !(r_vel.diagonal().minCoeff() > 0.0))
    throw ConfigError("velocity measurement covariance must be positive definite");
  if (!(localization.eps_bar > 0.0) || !(localization.eps_low > 0.0))
    throw ConfigError("localization constants must be > 0");
  if (!(gate_tau > 0.0)) throw ConfigError("gating threshold must be > 0");
  if (!(init_pos_var > 0.0) || !(init_vel_var > 0.0)) throw ConfigError("initial variances must be > 0");
}

FilterState initial_state(const FilterParams& params) {
  FilterState fs;
  fs.P.setZero();
  fs.P.topLeftCorner<3, 3>() = params.init_pos_var * Mat3::Identity();
  fs.P.bottomRightCorner<3, 3>() = params.init_vel_var * Mat3::Identity();
  return fs;
}

FilterState predict(const FilterState& fs, double T_s, const FilterParams& params, const Vec3& reference_velocity) {
  if (!(T_s >= 0.0) || !std::isfinite(T_s)) throw std::invalid_argument("sampling period must be finite and >= 0");
  Mat6 F = Mat6::Identity();
  F.topRightCorner<3, 3>() = T_s * Mat3::Identity();
  Mat6 Q = Mat6::Zero();
  Q.topLeftCorner<3, 3>() = params.sigma2_pos * Mat3::Identity();
  Q.bottomRightCorner<3, 3>() = params.sigma2_vel * Mat3::Identity();

  FilterState out = fs;
  out.x = F * fs.x;
  out.x.head<3>() += T_s * reference_velocity;
  out.P = F * fs.P * F.transpose() + Q;
  out.k = fs.k + 1;
  out.t = fs.t + T_s;
  return out;
}

Mat3 innovation_covariance(const FilterState& fs, const RelPosMeasurement& m) {
  return fs.P.topLeftCorner<3, 3>() + m.cov;
}

GateResult gate(std::span<const RelPosMeasurement> candidates, const FilterState& fs, const FilterParams& params) {
  GateResult r;
  r.distance2.assign(candidates.size(), std::numeric_limits<double>::quiet_NaN());
  const double tau2 = params.gate_tau * params.gate_tau;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Mat3 S = innovation_covariance(fs, candidates[i]);
    const Mat3 Ssym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> eig(Ssym, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxInnovationCondition) {
      ++r.singular_rejections;
      continue;
    }
    const Vec3 e = candidates[i].p - fs.position();
    const double d2 = e.dot(Ssym.ldlt().solve(e));
    r.distance2[i] = d2;
    if (d2 <= tau2) r.admitted.push_back(i);
  }
  r.beta = r.admitted.empty() ? 1 : 0;
  return r;
}

std::size_t associate(std::span<const RelPosMeasurement> candidates, std::span<const std::size_t> admissible,
                      const FilterState& fs) {
  if (admissible.empty()) throw std::invalid_argument("association needs at least one admissible candidate");
  std::size_t best = admissible.front();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t idx : admissible) {
    const Vec3 e = candidates[idx].p - fs.position();
    const double d2 = e.dot(innovation_covariance(fs, candidates[idx]).ldlt().solve(e));
    if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
      best = idx;
      best_d2 = d2;
    }
  }
  return best;
}

namespace {

template <int Offset>
void correct(Vec6& x, Mat6& P, const Vec3& y, const Mat3& R) {
  const Vec3 innovation = y - x.segment<3>(Offset);
  if (!innovation.allFinite()) throw NumericalError("non-finite innovation");
  const Mat3 S = P.block<3, 3>(Offset, Offset) + R;
  // K = P C' S^-1 with C selecting rows [Offset, Offset + 3).
  const Eigen::Matrix<double, 6, 3> PCt = P.middleCols<3>(Offset);
  const Eigen::Matrix<double, 6, 3> K = S.ldlt().solve(PCt.transpose()).transpose();
  x += K * innovation;
  P -= K * PCt.transpose();
}

}  // namespace

std::size_t initiate_track(std::span<const RelPosMeasurement> candidates) {
  if (candidates.empty()) throw std::invalid_argument("track initiation needs at least one candidate");
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double cost = 0.0;
    for (const RelPosMeasurement& other : candidates) cost += (candidates[i].p - other.p).norm();
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  return best;
}

FilterState update(const FilterState& predicted, const Vec3& y_vel, const std::optional<RelPosMeasurement>& y_pos,
                   const FilterParams& params) {
  FilterState out = predicted;
  if (y_pos) {
    correct<0>(out.x, out.P, y_pos->p, y_pos->cov);
    out.has_position_fix = true;
  }
  correct<3>(out.x, out.P, y_vel, params.r_vel);
  out.P = 0.5 * (out.P + out.P.transpose());
  if (!out.x.allFinite() || !out.P.allFinite()) throw NumericalError("filter state became non-finite");
  return out;
}

double induced_norm(const Mat6& P) {
  Eigen::SelfAdjointEigenSolver<Mat6> eig(P, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace percsim
