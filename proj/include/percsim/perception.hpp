#pragma once

#include "percsim/geometry.hpp"
#include "percsim/rng.hpp"

#include <span>
#include <vector>

namespace percsim {

struct Detection {
  BoundingBox box;
  ClassId class_id = 0;
  double pr = 0.0;
  /// Ground-truth provenance: set on boxes produced by an injector. Never read by the estimator.
  bool injected = false;
};

struct DetectionSet {
  double frame_time = 0.0;
  std::vector<Detection> detections;

  std::size_t size() const { return detections.size(); }
  bool empty() const { return detections.empty(); }
};

/// Knobs of the synthetic detector. The learned model is replaced by geometric ground truth
/// plus pixel jitter.
struct DetectorParams {
  double pixel_noise = 1.0;        // std of each corner coordinate, px
  double base_confidence = 0.9;
  double confidence_jitter = 0.05;  // half-width of the uniform confidence jitter
  double confidence_threshold = 0.15;
  /// Carried as metadata only: the synthetic detector emits one box per object, so no NMS runs.
  double iou_threshold = 0.45;

  void validate() const;
};

struct CameraPose {
  Vec3 position = Vec3::Zero();
  Rotation3 camera_from_world;
};

DetectionSet detect(const CameraPose& pose, std::span<const ObjectModel> scene, const CameraIntrinsics& intr,
                    const DetectorParams& params, Rng& rng, double frame_time = 0.0);

/// Keeps detections with pr >= threshold, order preserved.
DetectionSet confidence_thresh_filter(const DetectionSet& ds, double conf_thresh);

/// Keeps detections of one class, order preserved.
DetectionSet class_filter(const DetectionSet& ds, ClassId cls);

}  // namespace percsim
