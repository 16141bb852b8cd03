#pragma once

// Synthetic scene generator: oscillating/rotating scan patterns, box targets
// with exact per-point timestamps, pinhole feature tracks, and ground truth.
// Every generator is a pure function of (config, seed), so datasets are
// reproducible byte for byte.

#include <cstdint>
#include <optional>
#include <vector>

#include "velocorr/geometry.hpp"
#include "velocorr/types.hpp"

namespace velocorr {

enum class ScanMode { kOscillating, kRotating };

struct ScanPatternConfig {
  ScanMode mode = ScanMode::kOscillating;
  double frame_duration = 0.1;   // seconds
  int points_per_frame = 20000;
  double fov_h = 1.2;            // radians, full width
  double fov_v = 0.5;            // radians, full height
  double osc_freq_az = 70.0;     // Hz
  double osc_freq_el = 110.0;    // Hz
  double osc_phase_az = M_PI / 2.0;
  double osc_phase_el = M_PI / 2.0;
  double rot_rate = 10.0;        // rev/s, rotating mode
  int rot_rings = 16;            // elevation ring count, rotating mode
  double range_noise_sigma = 0.0;  // meters

  void validate() const;
};

/// Oriented box moving at constant velocity, fixed yaw.
struct SimObject {
  int id = 0;
  Vec3 half_extents = Vec3(2.0, 1.0, 0.8);  // l/2, w/2, h/2
  Vec3 center0 = Vec3::Zero();              // global, at t = 0
  double yaw = 0.0;
  Vec3 velocity = Vec3::Zero();             // m/s, constant

  Vec3 center_at(double t) const { return center0 + t * velocity; }
};

struct CameraModel {
  double f_theta = 500.0;  // px, focal length along image u
  double f_phi = 500.0;    // px, along image v
  double cx = 760.0;
  double cy = 284.0;
  int width = 1520;
  int height = 568;
  Pose pose_in_sensor;  // camera frame: x = image u, y = image v, z = optical axis

  void validate() const;
  bool in_image(const Vec2& px) const {
    return px.x() >= 0.0 && px.x() < width && px.y() >= 0.0 && px.y() < height;
  }
};

struct TimedPoint {
  Vec3 position = Vec3::Zero();  // sensor frame at acquisition
  double stamp = 0.0;            // seconds, absolute
  int object_id = -1;            // -1 = unlabeled / ground
};

struct RawFrame {
  int index = 0;
  double start_stamp = 0.0;
  std::vector<TimedPoint> points;  // sorted by stamp
  Pose ego_pose_start;
  Pose ego_pose_end;
};

struct FeatureTrack {
  int object_id = 0;
  Vec2 pixel_t0 = Vec2::Zero();
  Vec2 pixel_t1 = Vec2::Zero();
  bool is_outlier = false;
};

struct Scene {
  std::vector<SimObject> objects;
  bool has_ground = false;
  double ground_z = 0.0;
};

/// Unit ray in the sensor frame at an in-frame time. Oscillating mode is a
/// two-axis sinusoid rosette; rotating mode sweeps azimuth at rot_rate while
/// cycling through a fixed elevation ring set.
Vec3 scan_direction(const ScanPatternConfig& cfg, double t_in_frame);

/// Slab intersection against the box at time t. Returns the nearest hit with
/// positive range, or nullopt on a miss.
std::optional<std::pair<Vec3, double>> raycast_box(const Vec3& origin, const Vec3& dir,
                                                   const SimObject& obj, double t);

/// One frame of timed points. Rays select a surface anchor on each object at
/// the frame-start pose and report it displaced by the object's motion at the
/// ray's own timestamp, which reproduces the constant-velocity distortion
/// model exactly; range noise is added along the line of sight.
RawFrame generate_frame(const Scene& scene, const EgoTrajectory& ego,
                        const ScanPatternConfig& cfg, int index, uint64_t rng_seed);

/// Pinhole feature tracks for one object between t0 and t1, using the
/// small-motion projection model (uniform flow f·v_tan·dt/d over the box, d
/// the object-center depth at t0). A fraction of tracks are replaced by
/// uniform random pixels and flagged as outliers. Returns an empty list when
/// the object is outside the camera FoV at t0.
std::vector<FeatureTrack> generate_feature_tracks(const SimObject& obj, const CameraModel& cam,
                                                  const EgoTrajectory& ego, double t0, double t1,
                                                  int n_tracks, double outlier_fraction,
                                                  double pixel_noise_sigma, uint64_t rng_seed);

/// Deterministic per-frame stream seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

}  // namespace velocorr
