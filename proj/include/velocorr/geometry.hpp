#pragma once

// Rigid-body geometry primitives shared by every stage: Rodrigues exp/log,
// constant-twist pose interpolation, and the radial/tangential frame used to
// split velocities between the sensor modalities.

#include <vector>

#include "velocorr/types.hpp"

namespace velocorr {

struct AxisAngle {
  Vec3 axis = Vec3::UnitZ();  // unit length; +z by convention when angle == 0
  double angle = 0.0;         // radians, in [0, pi] when produced by rodrigues_log
};

struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double stamp = 0.0;  // seconds, absolute

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }
};

/// Right-handed orthonormal triad anchored at the sensor: `radial` points at
/// the object, `tangential_1` is azimuthal, `tangential_2` polar.
struct RadialBasis {
  Vec3 radial;
  Vec3 tangential_1;
  Vec3 tangential_2;

  Mat3 as_matrix() const {
    Mat3 b;
    b.col(0) = radial;
    b.col(1) = tangential_1;
    b.col(2) = tangential_2;
    return b;
  }
};

Mat3 skew(const Vec3& v);

bool is_rotation(const Mat3& m, double tol = 1e-9);

/// Rodrigues formula: I + sin(angle)·K + (1 − cos(angle))·K², K = skew(axis).
/// Throws std::invalid_argument if the axis is not unit length (beyond 1e-6).
Mat3 rodrigues_exp(const AxisAngle& aa);

/// Inverse of rodrigues_exp. angle in [0, pi]; identity maps to (+z, 0); the
/// angle == pi singularity is resolved through the symmetric-part eigenvector.
AxisAngle rodrigues_log(const Mat3& r);

/// Pose at time t under the constant-twist motion between p0 and p1: rotation
/// follows the axis-angle geodesic, translation is linear in the p0-local
/// frame. t must lie in [p0.stamp, p1.stamp].
Pose interpolate_pose(const Pose& p0, const Pose& p1, double t);

/// Radial/tangential triad for an object seen from a sensor. `up` defaults to
/// global +z; when the line of sight is parallel to it (within 1e-6), global
/// +x takes over as the auxiliary vector.
RadialBasis radial_basis(const Vec3& object_center_global, const Vec3& sensor_origin_global,
                         const Vec3& up = Vec3::UnitZ());

struct TwistVelocity {
  Vec3 linear = Vec3::Zero();   // m/s, global frame
  Vec3 angular = Vec3::Zero();  // rad/s, global frame
};

/// Piecewise constant-twist trajectory: poses sorted by stamp, one per frame
/// boundary. pose_at interpolates within the covered span and throws
/// MissingPoseError outside it.
class EgoTrajectory {
 public:
  EgoTrajectory() = default;
  explicit EgoTrajectory(std::vector<Pose> poses);

  Pose pose_at(double t) const;

  /// Twist of the segment containing t (the one starting at t when t is a
  /// boundary), evaluated at the segment start.
  TwistVelocity velocity_at(double t) const;

  const std::vector<Pose>& poses() const { return poses_; }
  double start() const;
  double end() const;
  bool covers(double t0, double t1) const;

 private:
  std::vector<Pose> poses_;
};

}  // namespace velocorr
