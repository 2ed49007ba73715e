#pragma once

#include "percsim/types.hpp"

#include <array>
#include <optional>

namespace percsim {

/// Proper rotation matrix (orthonormal, det = +1). Construction validates.
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m);

  static Rotation3 identity() { return Rotation3{}; }
  /// Z-Y-X (yaw, pitch, roll) composition R = Rz(yaw) Ry(pitch) Rx(roll).
  static Rotation3 from_rpy(double roll, double pitch, double yaw);
  static Rotation3 from_axis_angle(const Vec3& axis_angle);

  const Mat3& matrix() const { return m_; }
  Rotation3 transpose() const;
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation3 operator*(const Rotation3& o) const;
  double yaw() const;

 private:
  struct Unchecked {};
  Rotation3(const Mat3& m, Unchecked) : m_(m) {}
  Mat3 m_;
};

/// Calibrated pinhole camera. Principal point sits at the image center.
struct CameraIntrinsics {
  double focal_px = 680.0;
  double width_px = 960.0;
  double height_px = 720.0;

  double cx() const { return width_px / 2.0; }
  double cy() const { return height_px / 2.0; }
  void validate() const;
};

struct BoxCorners {
  double x1, y1, x2, y2;
};

/// Axis-aligned image box in center form.
struct BoundingBox {
  double x = 0.0;  // center
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  static BoundingBox from_corners(const BoxCorners& c);
  BoxCorners corners() const { return {x - w / 2.0, y - h / 2.0, x + w / 2.0, y + h / 2.0}; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }
};

/// Planar, front-parallel landmark of known size.
struct ObjectModel {
  double width_m = 0.5;
  double height_m = 0.4;
  Vec3 position = Vec3::Zero();
  ClassId class_id = 0;

  void validate() const;
};

/// Constants of the confidence-weighted localization covariance.
struct LocalizationUncertainty {
  double eps_bar = 0.4;
  double eps_low = 0.01;
};

/// Relative position of the robot w.r.t. the object center, in the world frame.
struct RelPosMeasurement {
  Vec3 p = Vec3::Zero();
  Mat3 cov = Mat3::Identity();
  double source_confidence = 0.0;
  /// Index of the detection this candidate came from (provenance only).
  std::size_t source_index = 0;
};

/// Normalized image coordinates plus camera-frame depth.
struct ImagePoint {
  double x_bar = 0.0;
  double y_bar = 0.0;
  double depth = 0.0;

  double pixel_x(const CameraIntrinsics& in) const { return in.focal_px * x_bar + in.cx(); }
  double pixel_y(const CameraIntrinsics& in) const { return in.focal_px * y_bar + in.cy(); }
};

/// R_CW = R_CB R_BW for a camera mounted with body_from_camera on a body at world_from_body.
Rotation3 camera_from_world(const Rotation3& world_from_body, const Rotation3& body_from_camera);

/// Forward-looking camera on a FLU body: optical axis along body +x, image x to the
/// right, image y down. Positive tilt pitches the optical axis towards the ground.
Rotation3 forward_camera_mount(double tilt_down_rad = 0.0);

/// Camera-frame coordinates of the object for a robot at p_rel = p_robot - p_object.
Vec3 object_in_camera(const Vec3& p_rel, const Rotation3& R_cw);

/// Pinhole projection of the object center. Empty when behind the camera or outside the image.
std::optional<ImagePoint> project(const Vec3& p_rel, const Rotation3& R_cw, const CameraIntrinsics& intr);

/// Bounding box the object would produce, clipped to the image. Empty when behind the
/// camera or when less than kMinVisibleFraction of the box area is inside the frame.
std::optional<BoundingBox> render_box(const Vec3& p_rel, const Rotation3& R_cw,
                                      const CameraIntrinsics& intr, const ObjectModel& obj);

inline constexpr double kMinVisibleFraction = 0.25;

/// ((1 - pr) eps_bar + eps_low) I3
Mat3 localization_covariance(double pr, const LocalizationUncertainty& unc);

/// Inverse of render_box under the known-width depth model z = f W / w.
RelPosMeasurement localize_from_box(const BoundingBox& box, const Rotation3& R_cw,
                                    const CameraIntrinsics& intr, const ObjectModel& obj, double pr,
                                    const LocalizationUncertainty& unc);

/// Clip a box to [0, W] x [0, H]; empty if nothing remains.
std::optional<BoundingBox> clip_to_image(const BoundingBox& box, const CameraIntrinsics& intr);

}  // namespace percsim
