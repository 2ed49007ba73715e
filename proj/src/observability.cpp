#include "percsim/observability.hpp"

#include <cassert>
#include <stdexcept>

namespace percsim {

void GramianAccumulator::accumulate(double T_s, int beta_bar) { accumulate(T_s, {beta_bar, beta_bar, beta_bar}); }

void GramianAccumulator::accumulate(double T_s, const std::array<int, 3>& beta_bar_per_axis) {
  if (!(T_s > 0.0)) throw std::invalid_argument("sampling period must be > 0");
  Mat2 F;
  F << 1.0, T_s, 0.0, 1.0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const int bb = beta_bar_per_axis[i];
    if (bb != 0 && bb != 1) throw std::invalid_argument("measurement availability must be 0 or 1");
    Axis& a = axes_[i];
    const Mat2 PtP = a.transition.transpose() * a.transition;
    // C'C = diag(bb, 1): the position row drops out when the measurement is missed.
    const Eigen::RowVector2d vel_row = a.transition.row(1);
    a.standard += PtP;
    a.adversarial += bb ? PtP : Mat2(vel_row.transpose() * vel_row);
    a.transition = F * a.transition;
  }
  record_.push_back({T_s, beta_bar_per_axis[0]});
  ++steps_;
}

QualityRatio quality_ratio(const GramianAccumulator& acc) {
  if (acc.steps() < 1) throw std::logic_error("quality ratio needs at least one step");
  QualityRatio q;
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sd = acc.trace_standard(i);
    assert(sd > 0.0);  // the velocity row contributes 1 per step
    q.per_axis[static_cast<std::size_t>(i)] = acc.trace_adversarial(i) / sd;
    sum += q.per_axis[static_cast<std::size_t>(i)];
  }
  q.aggregate = sum / 3.0;
  return q;
}

double lower_bound(int n, double T_s) {
  const double nn = static_cast<double>(n);
  return 1.0 / (2.0 + T_s * T_s * nn * (2.0 * nn + 1.0) / 6.0);
}

}  // namespace percsim
