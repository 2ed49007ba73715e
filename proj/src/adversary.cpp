#include "percsim/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace percsim {

namespace {
// Boxes thinner than a pixel are not emitted by a detector.
constexpr double kMinBoxExtent = 1.0;
}  // namespace

void MisclassSpec::validate(int horizon_steps) const {
  if (n_blocks < 1) throw ConfigError("misclassification n_blocks must be >= 1");
  if (n_blocks > horizon_steps) throw ConfigError("misclassification n_blocks must not exceed the horizon");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("misclassification p must lie in [0, 1]");
}

MisclassSchedule::MisclassSchedule(const MisclassSpec& spec, int horizon_steps, Rng rng)
    : spec_(spec), horizon_(horizon_steps), rng_(std::move(rng)) {
  if (horizon_steps < 1) throw ConfigError("horizon must be >= 1");
  spec.validate(horizon_steps);
  block_len_ = (horizon_steps + spec.n_blocks - 1) / spec.n_blocks;
  realized_.assign(static_cast<std::size_t>((horizon_steps + block_len_ - 1) / block_len_), -1);
}

bool MisclassSchedule::attacked(int step) {
  if (step < 0 || step >= horizon_) throw std::out_of_range("step outside the schedule horizon");
  const auto block = static_cast<std::size_t>(block_of(step));
  if (realized_[block] < 0) {
    std::bernoulli_distribution coin(spec_.p);
    for (std::size_t i = 0; i <= block; ++i)
      if (realized_[i] < 0) realized_[i] = coin(rng_) ? 1 : 0;
  }
  return realized_[block] == 1;
}

void MislocSpec::validate() const {
  if (b < 0) throw ConfigError("mislocalization b must be >= 0");
  if (!(q >= 0.0)) throw ConfigError("mislocalization q must be >= 0");
  if (!(conf_boost >= 0.0)) throw ConfigError("mislocalization conf_boost must be >= 0");
  if (max_redraws < 1) throw ConfigError("mislocalization max_redraws must be >= 1");
}

void OverloadModel::validate() const {
  if (!(base_cost > 0.0)) throw ConfigError("overload base_cost must be > 0");
  if (!(per_box_cost >= 0.0)) throw ConfigError("overload per_box_cost must be >= 0");
}

DetectionSet apply_misclassification(const DetectionSet& ds, MisclassSchedule& sched, int step,
                                     ClassId target_class) {
  DetectionSet out = ds;
  if (!sched.attacked(step)) return out;
  for (Detection& d : out.detections)
    if (d.class_id == target_class) d.class_id = sched.spec().decoy_class;
  return out;
}

DetectionSet apply_mislocalization(const DetectionSet& ds, const MislocSpec& spec, ClassId target_class,
                                   const CameraIntrinsics& intr, Rng& rng, MislocStats* stats) {
  DetectionSet out = ds;
  if (spec.b == 0) return out;
  std::uniform_real_distribution<double> scale(1.0 - spec.q, 1.0 + spec.q);

  for (const Detection& nominal : ds.detections) {
    if (nominal.class_id != target_class || nominal.injected) continue;
    const BoxCorners c = nominal.box.corners();
    for (int i = 0; i < spec.b; ++i) {
      std::optional<BoundingBox> spurious;
      for (int attempt = 0; attempt < spec.max_redraws && !spurious; ++attempt) {
        BoxCorners s{c.x1 * scale(rng), c.y1 * scale(rng), c.x2 * scale(rng), c.y2 * scale(rng)};
        if (s.x1 > s.x2) std::swap(s.x1, s.x2);
        if (s.y1 > s.y2) std::swap(s.y1, s.y2);
        auto clipped = clip_to_image(BoundingBox::from_corners(s), intr);
        if (clipped && clipped->w >= kMinBoxExtent && clipped->h >= kMinBoxExtent) spurious = clipped;
      }
      if (!spurious) {
        if (stats) ++stats->skipped;
        continue;
      }
      out.detections.push_back(
          {*spurious, nominal.class_id, std::clamp(nominal.pr + spec.conf_boost, 0.0, 1.0), true});
      if (stats) ++stats->injected;
    }
  }
  return out;
}

double frame_latency(std::size_t m, const OverloadModel& ov) {
  return ov.base_cost + static_cast<double>(m) * ov.per_box_cost;
}

double next_period(std::size_t m, const OverloadModel& ov, double min_period) {
  return std::max(frame_latency(m, ov), min_period);
}

double detection_distance(const Detection& a, const Detection& b) {
  if (a.class_id != b.class_id) return std::numeric_limits<double>::infinity();
  const BoxCorners p = a.box.corners();
  const BoxCorners q = b.box.corners();
  return std::hypot(std::hypot(p.x1 - q.x1, p.y1 - q.y1), std::hypot(p.x2 - q.x2, p.y2 - q.y2));
}

std::vector<double> detection_distance(const DetectionSet& s1, const DetectionSet& s2,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) out.push_back(detection_distance(s1.detections.at(i), s2.detections.at(j)));
  return out;
}

}  // namespace percsim
