#include "velocorr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "velocorr/errors.hpp"

namespace velocorr {

namespace {

Mat3 yaw_rotation(double yaw) {
  Mat3 r;
  const double c = std::cos(yaw), s = std::sin(yaw);
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Vec3 ray_from_angles(double az, double el) {
  const double ce = std::cos(el);
  return Vec3(ce * std::cos(az), ce * std::sin(az), std::sin(el));
}

}  // namespace

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer over the combined words
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void ScanPatternConfig::validate() const {
  if (frame_duration <= 0.0) throw ConfigError("scan: frame_duration must be > 0");
  if (points_per_frame < 1) throw ConfigError("scan: points_per_frame must be >= 1");
  if (range_noise_sigma < 0.0) throw ConfigError("scan: range_noise_sigma must be >= 0");
  if (fov_h <= 0.0 || fov_v <= 0.0) throw ConfigError("scan: FoV must be positive");
  if (mode == ScanMode::kOscillating) {
    if (osc_freq_az <= 0.0 || osc_freq_el <= 0.0) {
      throw ConfigError("scan: oscillation frequencies must be positive");
    }
    // The rosette should not close after a couple of sweeps, or it never
    // covers the FoV: reject frequency ratios equal to p/q with q <= 4.
    const double ratio = osc_freq_az / osc_freq_el;
    for (int q = 1; q <= 4; ++q) {
      const double p = ratio * q;
      if (std::abs(p - std::round(p)) < 1e-9) {
        throw ConfigError("scan: osc_freq_az/osc_freq_el must not be a small rational (q <= 4)");
      }
    }
  } else {
    if (rot_rate <= 0.0) throw ConfigError("scan: rot_rate must be positive");
    if (rot_rings < 1) throw ConfigError("scan: rot_rings must be >= 1");
  }
}

void CameraModel::validate() const {
  if (f_theta <= 0.0 || f_phi <= 0.0) throw ConfigError("camera: focal lengths must be positive");
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw ConfigError("camera: principal point must lie inside the image");
  }
}

Vec3 scan_direction(const ScanPatternConfig& cfg, double t_in_frame) {
  if (t_in_frame < 0.0 || t_in_frame > cfg.frame_duration) {
    throw std::out_of_range("scan_direction: t outside the frame");
  }
  if (cfg.mode == ScanMode::kOscillating) {
    const double az =
        0.5 * cfg.fov_h * std::sin(2.0 * M_PI * cfg.osc_freq_az * t_in_frame + cfg.osc_phase_az);
    const double el =
        0.5 * cfg.fov_v * std::sin(2.0 * M_PI * cfg.osc_freq_el * t_in_frame + cfg.osc_phase_el);
    return ray_from_angles(az, el);
  }
  double az = std::fmod(2.0 * M_PI * cfg.rot_rate * t_in_frame, 2.0 * M_PI);
  if (az > M_PI) az -= 2.0 * M_PI;
  // Rings fire interleaved at the point rate, covering the vertical FoV.
  const double point_rate = cfg.points_per_frame / cfg.frame_duration;
  const int ring = static_cast<int>(std::floor(t_in_frame * point_rate)) % cfg.rot_rings;
  const double el = cfg.rot_rings == 1
                        ? 0.0
                        : -0.5 * cfg.fov_v + cfg.fov_v * ring / (cfg.rot_rings - 1.0);
  return ray_from_angles(az, el);
}

std::optional<std::pair<Vec3, double>> raycast_box(const Vec3& origin, const Vec3& dir,
                                                   const SimObject& obj, double t) {
  const Mat3 r = yaw_rotation(obj.yaw);
  const Vec3 o = r.transpose() * (origin - obj.center_at(t));
  const Vec3 d = r.transpose() * dir;

  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double lo = -obj.half_extents[k], hi = obj.half_extents[k];
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < lo || o[k] > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - o[k]) / d[k];
    double t1 = (hi - o[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far < 0.0) return std::nullopt;
  const double range = t_near > 0.0 ? t_near : t_far;
  if (range <= 0.0) return std::nullopt;
  return std::make_pair(origin + range * dir, range);
}

RawFrame generate_frame(const Scene& scene, const EgoTrajectory& ego,
                        const ScanPatternConfig& cfg, int index, uint64_t rng_seed) {
  cfg.validate();
  const double t0 = index * cfg.frame_duration;
  const double t1 = t0 + cfg.frame_duration;
  if (!ego.covers(t0, t1)) {
    throw MissingPoseError("generate_frame: ego trajectory does not cover the frame");
  }

  RawFrame frame;
  frame.index = index;
  frame.start_stamp = t0;
  frame.ego_pose_start = ego.pose_at(t0);
  frame.ego_pose_end = ego.pose_at(t1);

  std::mt19937_64 rng(mix_seed(rng_seed, static_cast<uint64_t>(index)));
  std::normal_distribution<double> range_noise(0.0, 1.0);

  const double dt = cfg.frame_duration / cfg.points_per_frame;
  frame.points.reserve(cfg.points_per_frame / 4);
  for (int k = 0; k < cfg.points_per_frame; ++k) {
    // Midpoint timestamps: symmetric about mid-frame and strictly inside it.
    const double stamp = t0 + (k + 0.5) * dt;
    const Pose pose = ego.pose_at(stamp);
    const Vec3 dir_global = pose.rotation * scan_direction(cfg, stamp - t0);
    const Vec3& origin = pose.translation;

    // Nearest surface among objects (anchored at the frame-start pose, then
    // displaced by the object's motion up to the ray time) and the ground.
    double best_range = std::numeric_limits<double>::infinity();
    Vec3 best_point = Vec3::Zero();
    int best_id = -2;
    for (const SimObject& obj : scene.objects) {
      const auto hit = raycast_box(origin, dir_global, obj, t0);
      if (!hit) continue;
      const Vec3 displaced = hit->first + (stamp - t0) * obj.velocity;
      const double range = (displaced - origin).norm();
      if (range < best_range) {
        best_range = range;
        best_point = displaced;
        best_id = obj.id;
      }
    }
    if (scene.has_ground && std::abs(dir_global.z()) > 1e-12) {
      const double r = (scene.ground_z - origin.z()) / dir_global.z();
      if (r > 0.0 && r < best_range) {
        best_range = r;
        best_point = origin + r * dir_global;
        best_id = -1;
      }
    }

    // Every ray draws from the noise stream so the sampled sequence does not
    // depend on the scene contents.
    const double eps = range_noise(rng) * cfg.range_noise_sigma;
    if (best_id == -2) continue;

    TimedPoint p;
    Vec3 sensor_pt = pose.apply_inverse(best_point);
    const double rng_norm = sensor_pt.norm();
    if (rng_norm > 1e-12) sensor_pt += eps * sensor_pt / rng_norm;
    p.position = sensor_pt;
    p.stamp = stamp;
    p.object_id = best_id;
    frame.points.push_back(p);
  }
  return frame;
}

namespace {

struct CameraFrame {
  Mat3 rotation;    // camera-to-global
  Vec3 position;    // global
};

CameraFrame camera_at(const CameraModel& cam, const EgoTrajectory& ego, double t) {
  const Pose p = ego.pose_at(t);
  CameraFrame f;
  f.rotation = p.rotation * cam.pose_in_sensor.rotation;
  f.position = p.rotation * cam.pose_in_sensor.translation + p.translation;
  return f;
}

std::optional<Vec2> project(const CameraModel& cam, const CameraFrame& f, const Vec3& p_global) {
  const Vec3 pc = f.rotation.transpose() * (p_global - f.position);
  if (pc.z() <= 1e-6) return std::nullopt;
  const Vec2 px(cam.cx + cam.f_theta * pc.x() / pc.z(), cam.cy + cam.f_phi * pc.y() / pc.z());
  if (!cam.in_image(px)) return std::nullopt;
  return px;
}

}  // namespace

std::vector<FeatureTrack> generate_feature_tracks(const SimObject& obj, const CameraModel& cam,
                                                  const EgoTrajectory& ego, double t0, double t1,
                                                  int n_tracks, double outlier_fraction,
                                                  double pixel_noise_sigma, uint64_t rng_seed) {
  cam.validate();
  if (n_tracks < 1) throw std::invalid_argument("generate_feature_tracks: n_tracks must be >= 1");
  if (outlier_fraction < 0.0 || outlier_fraction >= 0.5) {
    throw std::invalid_argument("generate_feature_tracks: outlier_fraction must be in [0, 0.5)");
  }
  if (!(t1 > t0)) throw std::invalid_argument("generate_feature_tracks: t1 must exceed t0");

  const CameraFrame cf = camera_at(cam, ego, t0);
  const Vec3 center = obj.center_at(t0);
  if (!project(cam, cf, center)) {
    return {};  // object not visible at t0
  }

  // Apparent flow under the small-motion model: the object-relative velocity
  // in camera axes, scaled by f/d with d the center depth at t0.
  const auto [ego_lin, ego_ang] = [&] {
    const auto tv = ego.velocity_at(t0);
    return std::make_pair(tv.linear, tv.angular);
  }();
  const Vec3 v_ego = ego_lin + ego_ang.cross(center - cf.position);
  const Vec3 v_rel_cam = cf.rotation.transpose() * (obj.velocity - v_ego);
  const double depth = (center - cf.position).norm();
  const Vec2 flow(cam.f_theta * v_rel_cam.x() / depth, cam.f_phi * v_rel_cam.y() / depth);
  const Vec2 drift = flow * (t1 - t0);

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> pix_noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Mat3 obj_rot = yaw_rotation(obj.yaw);

  std::vector<FeatureTrack> tracks;
  tracks.reserve(n_tracks);
  int attempts = 0;
  const int max_attempts = 200 * n_tracks;
  while (static_cast<int>(tracks.size()) < n_tracks && attempts < max_attempts) {
    ++attempts;
    // Sample a point on a face whose outward normal sees the camera.
    const int axis = static_cast<int>(unit(rng) * 3.0) % 3;
    const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
    Vec3 local = Vec3(unit(rng) * 2.0 - 1.0, unit(rng) * 2.0 - 1.0, unit(rng) * 2.0 - 1.0)
                     .cwiseProduct(obj.half_extents);
    local[axis] = side * obj.half_extents[axis];
    const Vec3 normal_global = obj_rot * (side * Vec3::Unit(axis));
    const Vec3 anchor = obj_rot * local + center;
    if (normal_global.dot(cf.position - anchor) <= 0.0) continue;

    const auto px0 = project(cam, cf, anchor);
    if (!px0) continue;

    FeatureTrack tr;
    tr.object_id = obj.id;
    tr.pixel_t0 = *px0 + pixel_noise_sigma * Vec2(pix_noise(rng), pix_noise(rng));
    tr.pixel_t1 = *px0 + drift + pixel_noise_sigma * Vec2(pix_noise(rng), pix_noise(rng));
    tracks.push_back(tr);
  }
  if (tracks.empty()) return {};

  // Replace an exact fraction with uniform random matches.
  const int n_outliers = static_cast<int>(std::llround(outlier_fraction * tracks.size()));
  std::vector<int> idx(tracks.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n_outliers; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(idx.size()) - 1);
    std::swap(idx[i], idx[pick(rng)]);
    FeatureTrack& tr = tracks[idx[i]];
    tr.pixel_t1 = Vec2(unit(rng) * cam.width, unit(rng) * cam.height);
    tr.is_outlier = true;
  }
  return tracks;
}

}  // namespace velocorr
