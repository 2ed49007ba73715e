#include "percsim/perception.hpp"

#include <algorithm>

namespace percsim {

void DetectorParams::validate() const {
  if (!(pixel_noise >= 0.0)) throw ConfigError("detector pixel_noise must be >= 0");
  if (!(base_confidence >= 0.0 && base_confidence <= 1.0))
    throw ConfigError("detector base_confidence must lie in [0, 1]");
  if (!(confidence_jitter >= 0.0)) throw ConfigError("detector confidence_jitter must be >= 0");
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0))
    throw ConfigError("detector confidence_threshold must lie in [0, 1]");
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) throw ConfigError("detector iou_threshold must lie in [0, 1]");
}

DetectionSet detect(const CameraPose& pose, std::span<const ObjectModel> scene, const CameraIntrinsics& intr,
                    const DetectorParams& params, Rng& rng, double frame_time) {
  DetectionSet out;
  out.frame_time = frame_time;
  std::normal_distribution<double> pixel(0.0, params.pixel_noise > 0.0 ? params.pixel_noise : 1.0);
  std::uniform_real_distribution<double> jitter(-params.confidence_jitter, params.confidence_jitter);

  for (const ObjectModel& obj : scene) {
    auto box = render_box(pose.position - obj.position, pose.camera_from_world, intr, obj);
    if (!box) continue;

    if (params.pixel_noise > 0.0) {
      BoxCorners c = box->corners();
      c.x1 += pixel(rng);
      c.y1 += pixel(rng);
      c.x2 += pixel(rng);
      c.y2 += pixel(rng);
      if (c.x1 > c.x2) std::swap(c.x1, c.x2);
      if (c.y1 > c.y2) std::swap(c.y1, c.y2);
      box = clip_to_image(BoundingBox::from_corners(c), intr);
      if (!box) continue;
    }

    double pr = params.base_confidence;
    if (params.confidence_jitter > 0.0) pr += jitter(rng);
    out.detections.push_back({*box, obj.class_id, std::clamp(pr, 0.0, 1.0), false});
  }
  return out;
}

DetectionSet confidence_thresh_filter(const DetectionSet& ds, double conf_thresh) {
  DetectionSet out;
  out.frame_time = ds.frame_time;
  std::copy_if(ds.detections.begin(), ds.detections.end(), std::back_inserter(out.detections),
               [&](const Detection& d) { return d.pr >= conf_thresh; });
  return out;
}

DetectionSet class_filter(const DetectionSet& ds, ClassId cls) {
  DetectionSet out;
  out.frame_time = ds.frame_time;
  std::copy_if(ds.detections.begin(), ds.detections.end(), std::back_inserter(out.detections),
               [&](const Detection& d) { return d.class_id == cls; });
  return out;
}

}  // namespace percsim
