#pragma once

#include "percsim/types.hpp"

#include <array>
#include <vector>

namespace percsim {

/// n-step observability Gramians of the per-axis double integrator with intermittent
/// position output. For each axis:
///   W_ad[n] = sum_{k<n} Phi(k)' C_k' C_k Phi(k),  C_k = diag(beta_bar_k, 1)
///   W_sd[n] = sum_{k<n} Phi(k)' Phi(k)
/// with Phi(0) = I and Phi(k+1) = [[1, T_s,k], [0, 1]] Phi(k).
class GramianAccumulator {
 public:
  struct Axis {
    Mat2 adversarial = Mat2::Zero();
    Mat2 standard = Mat2::Zero();
    Mat2 transition = Mat2::Identity();
  };

  struct Sample {
    double T_s;
    int beta_bar;
  };

  /// Adds step k's term with the current transition, then advances it by T_s = t_{k+1} - t_k.
  void accumulate(double T_s, int beta_bar);
  void accumulate(double T_s, const std::array<int, 3>& beta_bar_per_axis);

  int steps() const { return steps_; }
  const Axis& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Sample>& sampling_record() const { return record_; }

  double trace_adversarial(int axis = 0) const { return this->axis(axis).adversarial.trace(); }
  double trace_standard(int axis = 0) const { return this->axis(axis).standard.trace(); }

 private:
  std::array<Axis, 3> axes_{};
  std::vector<Sample> record_;
  int steps_ = 0;
};

struct QualityRatio {
  std::array<double, 3> per_axis{};
  double aggregate = 0.0;  // mean over axes
};

/// Tr(W_ad) / Tr(W_sd) per axis; requires at least one accumulated step.
QualityRatio quality_ratio(const GramianAccumulator& acc);

/// Approximate even-sampling lower bound 1 / (2 + T_s^2 n (2n + 1) / 6) on the quality ratio.
/// The exact all-missed value is 1 / (2 + T_s^2 (n - 1)(2n - 1) / 6); this closed form slightly
/// undershoots it.
double lower_bound(int n, double T_s);

}  // namespace percsim
