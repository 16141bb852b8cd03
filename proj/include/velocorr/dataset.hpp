#pragma once

// On-disk dataset bundle: manifest.json, frames/<000000>.csv, ego.csv,
// tracks/<000000>.csv, gt.csv. All text, UTF-8, LF; doubles are written with
// 17 significant digits so a reload reproduces them bit for bit.

#include <filesystem>
#include <string>
#include <vector>

#include "velocorr/sim.hpp"

namespace velocorr {

struct TrackGenConfig {
  int per_object = 60;
  double outlier_fraction = 0.1;
  double pixel_noise_sigma = 0.5;
};

struct DatasetManifest {
  int schema_version = 1;
  uint64_t seed = 0;
  int frame_count = 0;
  double frame_duration = 0.1;
  ScanPatternConfig scan;
  CameraModel camera;
  TrackGenConfig track_gen;
};

struct GtRow {
  double stamp = 0.0;
  int object_id = 0;
  Vec3 center = Vec3::Zero();
  double yaw = 0.0;
  Vec3 dims = Vec3::Zero();  // l, w, h
  Vec3 velocity = Vec3::Zero();
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<RawFrame> frames;
  EgoTrajectory ego;
  std::vector<std::vector<FeatureTrack>> tracks;  // one list per frame
  std::vector<GtRow> gt;                          // frame-major, object-minor
};

void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// FNV-1a over the manifest file bytes; ties a run directory to its dataset.
std::string manifest_hash(const std::filesystem::path& dataset_dir);

}  // namespace velocorr
