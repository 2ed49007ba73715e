#include "percsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace percsim {

namespace {
constexpr double kOrthoTol = 1e-9;
}

Rotation3::Rotation3(const Mat3& m) : m_(m) {
  if (!m.allFinite()) throw std::invalid_argument("rotation has non-finite entries");
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = m.determinant();
  if (ortho > kOrthoTol || std::abs(det - 1.0) > kOrthoTol)
    throw std::invalid_argument("matrix is not a proper rotation");
}

Rotation3 Rotation3::from_rpy(double roll, double pitch, double yaw) {
  const Mat3 m = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                  Eigen::AngleAxisd(roll, Vec3::UnitX()))
                     .toRotationMatrix();
  return Rotation3(m, Unchecked{});
}

Rotation3 Rotation3::from_axis_angle(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle == 0.0) return identity();
  return Rotation3(Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix(), Unchecked{});
}

Rotation3 Rotation3::transpose() const { return Rotation3(m_.transpose(), Unchecked{}); }

Rotation3 Rotation3::operator*(const Rotation3& o) const { return Rotation3(m_ * o.m_, Unchecked{}); }

double Rotation3::yaw() const { return std::atan2(m_(1, 0), m_(0, 0)); }

void CameraIntrinsics::validate() const {
  if (!(focal_px > 0.0)) throw ConfigError("camera focal length must be positive");
  if (!(width_px > 0.0) || !(height_px > 0.0)) throw ConfigError("camera image size must be positive");
}

BoundingBox BoundingBox::from_corners(const BoxCorners& c) {
  return {(c.x1 + c.x2) / 2.0, (c.y1 + c.y2) / 2.0, c.x2 - c.x1, c.y2 - c.y1};
}

void ObjectModel::validate() const {
  if (!(width_m > 0.0) || !(height_m > 0.0)) throw ConfigError("object size must be positive");
  if (!position.allFinite()) throw ConfigError("object position must be finite");
}

Rotation3 camera_from_world(const Rotation3& world_from_body, const Rotation3& body_from_camera) {
  return body_from_camera.transpose() * world_from_body.transpose();
}

Rotation3 forward_camera_mount(double tilt_down_rad) {
  // Columns are the camera axes expressed in the body frame.
  Mat3 level;
  level << 0.0, 0.0, 1.0,
          -1.0, 0.0, 0.0,
           0.0, -1.0, 0.0;
  // Pitching the body-frame optical axis down is a rotation about body +y.
  const Mat3 tilt = Eigen::AngleAxisd(tilt_down_rad, Vec3::UnitY()).toRotationMatrix();
  return Rotation3(tilt * level);
}

Vec3 object_in_camera(const Vec3& p_rel, const Rotation3& R_cw) { return -(R_cw * p_rel); }

std::optional<ImagePoint> project(const Vec3& p_rel, const Rotation3& R_cw, const CameraIntrinsics& intr) {
  const Vec3 c = object_in_camera(p_rel, R_cw);
  if (!(c.z() > 0.0)) return std::nullopt;
  ImagePoint ip{c.x() / c.z(), c.y() / c.z(), c.z()};
  const double u = ip.pixel_x(intr);
  const double v = ip.pixel_y(intr);
  if (u < 0.0 || u > intr.width_px || v < 0.0 || v > intr.height_px) return std::nullopt;
  return ip;
}

std::optional<BoundingBox> clip_to_image(const BoundingBox& box, const CameraIntrinsics& intr) {
  const BoxCorners c = box.corners();
  const BoxCorners k{std::clamp(c.x1, 0.0, intr.width_px), std::clamp(c.y1, 0.0, intr.height_px),
                     std::clamp(c.x2, 0.0, intr.width_px), std::clamp(c.y2, 0.0, intr.height_px)};
  if (!(k.x2 > k.x1) || !(k.y2 > k.y1)) return std::nullopt;
  const bool untouched = k.x1 == c.x1 && k.y1 == c.y1 && k.x2 == c.x2 && k.y2 == c.y2;
  if (untouched) return box;  // keep the center form bit-exact
  return BoundingBox::from_corners(k);
}

std::optional<BoundingBox> render_box(const Vec3& p_rel, const Rotation3& R_cw,
                                      const CameraIntrinsics& intr, const ObjectModel& obj) {
  const Vec3 c = object_in_camera(p_rel, R_cw);
  if (!(c.z() > 0.0)) return std::nullopt;
  const double f = intr.focal_px;
  BoundingBox full{f * c.x() / c.z() + intr.cx(), f * c.y() / c.z() + intr.cy(), f * obj.width_m / c.z(),
                   f * obj.height_m / c.z()};
  auto clipped = clip_to_image(full, intr);
  if (!clipped) return std::nullopt;
  if (clipped->area() < kMinVisibleFraction * full.area()) return std::nullopt;
  return clipped;
}

Mat3 localization_covariance(double pr, const LocalizationUncertainty& unc) {
  return ((1.0 - pr) * unc.eps_bar + unc.eps_low) * Mat3::Identity();
}

RelPosMeasurement localize_from_box(const BoundingBox& box, const Rotation3& R_cw,
                                    const CameraIntrinsics& intr, const ObjectModel& obj, double pr,
                                    const LocalizationUncertainty& unc) {
  if (!box.valid()) throw std::invalid_argument("bounding box must have positive extent");
  if (!(pr >= 0.0 && pr <= 1.0)) throw std::invalid_argument("confidence must lie in [0, 1]");
  const double depth = intr.focal_px * obj.width_m / box.w;
  const Vec3 ray{(box.x - intr.cx()) / intr.focal_px, (box.y - intr.cy()) / intr.focal_px, 1.0};
  RelPosMeasurement m;
  // The camera sees the object at +depth*ray, so the robot sits at the negated ray.
  m.p = -(R_cw.transpose() * (depth * ray));
  m.cov = localization_covariance(pr, unc);
  m.source_confidence = pr;
  return m;
}

}  // namespace percsim
