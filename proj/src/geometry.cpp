#include "velocorr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "velocorr/errors.hpp"

namespace velocorr {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

bool is_rotation(const Mat3& m, double tol) {
  return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(m.determinant() - 1.0) <= tol;
}

Mat3 rodrigues_exp(const AxisAngle& aa) {
  if (std::abs(aa.axis.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("rodrigues_exp: axis must be unit length");
  }
  const Mat3 k = skew(aa.axis);
  return Mat3::Identity() + std::sin(aa.angle) * k + (1.0 - std::cos(aa.angle)) * k * k;
}

AxisAngle rodrigues_log(const Mat3& r) {
  const double cos_angle = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double angle = std::acos(cos_angle);

  AxisAngle out;
  out.angle = angle;
  if (angle < 1e-10) {
    out.axis = Vec3::UnitZ();
    out.angle = 0.0;
    return out;
  }
  if (angle < M_PI - 1e-6) {
    Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    out.axis = w / (2.0 * std::sin(angle));
    out.axis.normalize();
    return out;
  }
  // Near pi the skew part vanishes; the axis is the unit eigenvector of the
  // symmetric part for eigenvalue 1.
  const Mat3 sym = 0.5 * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(sym);
  Vec3 axis = es.eigenvectors().col(2);
  axis.normalize();
  // Fix the sign so that exp(axis, angle) reproduces r even slightly off pi.
  Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (w.dot(axis) < 0.0) axis = -axis;
  out.axis = axis;
  return out;
}

Pose interpolate_pose(const Pose& p0, const Pose& p1, double t) {
  if (!(p1.stamp > p0.stamp)) {
    throw std::invalid_argument("interpolate_pose: p1.stamp must exceed p0.stamp");
  }
  if (t < p0.stamp || t > p1.stamp) {
    throw std::out_of_range("interpolate_pose: t outside [p0.stamp, p1.stamp]");
  }
  const double s = (t - p0.stamp) / (p1.stamp - p0.stamp);

  const Mat3 rel = p0.rotation.transpose() * p1.rotation;
  AxisAngle aa = rodrigues_log(rel);
  aa.angle *= s;
  const Vec3 t_rel = p0.rotation.transpose() * (p1.translation - p0.translation);

  Pose out;
  out.rotation = p0.rotation * rodrigues_exp(aa);
  out.translation = p0.rotation * (s * t_rel) + p0.translation;
  out.stamp = t;
  return out;
}

RadialBasis radial_basis(const Vec3& object_center_global, const Vec3& sensor_origin_global,
                         const Vec3& up) {
  const Vec3 d = object_center_global - sensor_origin_global;
  const double dist = d.norm();
  if (dist <= 1e-3) {
    throw DegenerateGeometryError("radial_basis: object center coincides with sensor origin");
  }
  RadialBasis b;
  b.radial = d / dist;
  Vec3 aux = up;
  if (b.radial.cross(aux).norm() < 1e-6) {
    aux = Vec3::UnitX();
  }
  b.tangential_1 = b.radial.cross(aux).normalized();
  b.tangential_2 = b.radial.cross(b.tangential_1);
  return b;
}

EgoTrajectory::EgoTrajectory(std::vector<Pose> poses) : poses_(std::move(poses)) {
  if (poses_.size() < 2) {
    throw std::invalid_argument("EgoTrajectory: need at least two poses");
  }
  for (size_t i = 1; i < poses_.size(); ++i) {
    if (!(poses_[i].stamp > poses_[i - 1].stamp)) {
      throw std::invalid_argument("EgoTrajectory: stamps must strictly increase");
    }
  }
}

double EgoTrajectory::start() const { return poses_.front().stamp; }
double EgoTrajectory::end() const { return poses_.back().stamp; }

bool EgoTrajectory::covers(double t0, double t1) const {
  return !poses_.empty() && t0 >= start() - 1e-12 && t1 <= end() + 1e-12;
}

TwistVelocity EgoTrajectory::velocity_at(double t) const {
  if (poses_.empty() || t < start() - 1e-12 || t > end() + 1e-12) {
    throw MissingPoseError("EgoTrajectory: no pose coverage at t=" + std::to_string(t));
  }
  t = std::clamp(t, start(), end());
  size_t i = 0;
  while (i + 2 < poses_.size() && t >= poses_[i + 1].stamp) ++i;
  const Pose& p0 = poses_[i];
  const Pose& p1 = poses_[i + 1];
  const double dt = p1.stamp - p0.stamp;

  TwistVelocity tv;
  tv.linear = (p1.translation - p0.translation) / dt;
  const AxisAngle aa = rodrigues_log(p0.rotation.transpose() * p1.rotation);
  tv.angular = p0.rotation * (aa.axis * (aa.angle / dt));
  return tv;
}

Pose EgoTrajectory::pose_at(double t) const {
  if (poses_.empty() || t < start() - 1e-12 || t > end() + 1e-12) {
    throw MissingPoseError("EgoTrajectory: no pose coverage at t=" + std::to_string(t));
  }
  t = std::clamp(t, start(), end());
  auto it = std::upper_bound(poses_.begin(), poses_.end(), t,
                             [](double v, const Pose& p) { return v < p.stamp; });
  if (it == poses_.begin()) return poses_.front();
  if (it == poses_.end()) return poses_.back();
  const Pose& p1 = *it;
  const Pose& p0 = *(it - 1);
  return interpolate_pose(p0, p1, t);
}

}  // namespace velocorr
