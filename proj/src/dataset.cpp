#include "velocorr/dataset.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>
#include <json.hpp>

#include "velocorr/errors.hpp"

namespace velocorr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string frame_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);  // binary keeps LF newlines everywhere
  if (!f) throw IoError("cannot open for writing: " + p.string());
  return f;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + p.string());
  return f;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  return out;
}

void expect_header(std::istream& in, const std::string& want, const fs::path& p) {
  std::string line;
  if (!std::getline(in, line) || line != want) {
    throw IoError("bad header in " + p.string() + " (expected '" + want + "')");
  }
}

json scan_to_json(const ScanPatternConfig& s) {
  return json{{"mode", s.mode == ScanMode::kOscillating ? "oscillating" : "rotating"},
              {"frame_duration", s.frame_duration},
              {"points_per_frame", s.points_per_frame},
              {"fov_h", s.fov_h},
              {"fov_v", s.fov_v},
              {"osc_freq_az", s.osc_freq_az},
              {"osc_freq_el", s.osc_freq_el},
              {"osc_phase_az", s.osc_phase_az},
              {"osc_phase_el", s.osc_phase_el},
              {"rot_rate", s.rot_rate},
              {"rot_rings", s.rot_rings},
              {"range_noise_sigma", s.range_noise_sigma}};
}

ScanPatternConfig scan_from_json(const json& j) {
  ScanPatternConfig s;
  const std::string mode = j.at("mode");
  if (mode == "oscillating") {
    s.mode = ScanMode::kOscillating;
  } else if (mode == "rotating") {
    s.mode = ScanMode::kRotating;
  } else {
    throw IoError("manifest: unknown scan mode '" + mode + "'");
  }
  s.frame_duration = j.at("frame_duration");
  s.points_per_frame = j.at("points_per_frame");
  s.fov_h = j.at("fov_h");
  s.fov_v = j.at("fov_v");
  s.osc_freq_az = j.at("osc_freq_az");
  s.osc_freq_el = j.at("osc_freq_el");
  s.osc_phase_az = j.at("osc_phase_az");
  s.osc_phase_el = j.at("osc_phase_el");
  s.rot_rate = j.at("rot_rate");
  s.rot_rings = j.at("rot_rings");
  s.range_noise_sigma = j.at("range_noise_sigma");
  return s;
}

json pose_to_json(const Pose& p) {
  Eigen::Quaterniond q(p.rotation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return json{{"q", {q.w(), q.x(), q.y(), q.z()}},
              {"t", {p.translation.x(), p.translation.y(), p.translation.z()}},
              {"stamp", p.stamp}};
}

Pose pose_from_json(const json& j) {
  Pose p;
  const auto& q = j.at("q");
  p.rotation =
      Eigen::Quaterniond(q.at(0), q.at(1), q.at(2), q.at(3)).normalized().toRotationMatrix();
  const auto& t = j.at("t");
  p.translation = Vec3(t.at(0), t.at(1), t.at(2));
  p.stamp = j.at("stamp");
  return p;
}

}  // namespace

void save_dataset(const Dataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "frames", ec);
  fs::create_directories(dir / "tracks", ec);
  if (!fs::is_directory(dir / "frames") || !fs::is_directory(dir / "tracks")) {
    throw IoError("cannot create dataset directory: " + dir.string());
  }

  json manifest{
      {"schema_version", ds.manifest.schema_version},
      {"seed", ds.manifest.seed},
      {"frame_count", ds.manifest.frame_count},
      {"frame_duration", ds.manifest.frame_duration},
      {"scan", scan_to_json(ds.manifest.scan)},
      {"camera",
       {{"f_theta", ds.manifest.camera.f_theta},
        {"f_phi", ds.manifest.camera.f_phi},
        {"cx", ds.manifest.camera.cx},
        {"cy", ds.manifest.camera.cy},
        {"width", ds.manifest.camera.width},
        {"height", ds.manifest.camera.height},
        {"pose_in_sensor", pose_to_json(ds.manifest.camera.pose_in_sensor)}}},
      {"track_gen",
       {{"per_object", ds.manifest.track_gen.per_object},
        {"outlier_fraction", ds.manifest.track_gen.outlier_fraction},
        {"pixel_noise_sigma", ds.manifest.track_gen.pixel_noise_sigma}}}};
  {
    auto f = open_out(dir / "manifest.json");
    f << manifest.dump(2) << "\n";
  }

  for (const RawFrame& frame : ds.frames) {
    auto f = open_out(dir / "frames" / (frame_name(frame.index) + ".csv"));
    f << "x,y,z,stamp,object_id\n";
    for (const TimedPoint& p : frame.points) {
      f << fmt(p.position.x()) << ',' << fmt(p.position.y()) << ',' << fmt(p.position.z()) << ','
        << fmt(p.stamp) << ',' << p.object_id << '\n';
    }
  }

  {
    auto f = open_out(dir / "ego.csv");
    f << "stamp,qw,qx,qy,qz,tx,ty,tz\n";
    for (const Pose& p : ds.ego.poses()) {
      Eigen::Quaterniond q(p.rotation);
      q.normalize();
      if (q.w() < 0.0) q.coeffs() *= -1.0;
      f << fmt(p.stamp) << ',' << fmt(q.w()) << ',' << fmt(q.x()) << ',' << fmt(q.y()) << ','
        << fmt(q.z()) << ',' << fmt(p.translation.x()) << ',' << fmt(p.translation.y()) << ','
        << fmt(p.translation.z()) << '\n';
    }
  }

  for (size_t i = 0; i < ds.tracks.size(); ++i) {
    auto f = open_out(dir / "tracks" / (frame_name(static_cast<int>(i)) + ".csv"));
    f << "object_id,u0,v0,u1,v1,is_outlier\n";
    for (const FeatureTrack& t : ds.tracks[i]) {
      f << t.object_id << ',' << fmt(t.pixel_t0.x()) << ',' << fmt(t.pixel_t0.y()) << ','
        << fmt(t.pixel_t1.x()) << ',' << fmt(t.pixel_t1.y()) << ',' << (t.is_outlier ? 1 : 0)
        << '\n';
    }
  }

  {
    auto f = open_out(dir / "gt.csv");
    f << "stamp,object_id,cx,cy,cz,yaw,l,w,h,vx,vy,vz\n";
    for (const GtRow& g : ds.gt) {
      f << fmt(g.stamp) << ',' << g.object_id << ',' << fmt(g.center.x()) << ','
        << fmt(g.center.y()) << ',' << fmt(g.center.z()) << ',' << fmt(g.yaw) << ','
        << fmt(g.dims.x()) << ',' << fmt(g.dims.y()) << ',' << fmt(g.dims.z()) << ','
        << fmt(g.velocity.x()) << ',' << fmt(g.velocity.y()) << ',' << fmt(g.velocity.z()) << '\n';
    }
  }
}

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  {
    auto f = open_in(dir / "manifest.json");
    json manifest = json::parse(f);
    ds.manifest.schema_version = manifest.at("schema_version");
    if (ds.manifest.schema_version != 1) {
      throw IoError("manifest: unsupported schema_version in " + dir.string());
    }
    ds.manifest.seed = manifest.at("seed");
    ds.manifest.frame_count = manifest.at("frame_count");
    ds.manifest.frame_duration = manifest.at("frame_duration");
    ds.manifest.scan = scan_from_json(manifest.at("scan"));
    const json& cam = manifest.at("camera");
    ds.manifest.camera.f_theta = cam.at("f_theta");
    ds.manifest.camera.f_phi = cam.at("f_phi");
    ds.manifest.camera.cx = cam.at("cx");
    ds.manifest.camera.cy = cam.at("cy");
    ds.manifest.camera.width = cam.at("width");
    ds.manifest.camera.height = cam.at("height");
    ds.manifest.camera.pose_in_sensor = pose_from_json(cam.at("pose_in_sensor"));
    const json& tg = manifest.at("track_gen");
    ds.manifest.track_gen.per_object = tg.at("per_object");
    ds.manifest.track_gen.outlier_fraction = tg.at("outlier_fraction");
    ds.manifest.track_gen.pixel_noise_sigma = tg.at("pixel_noise_sigma");
  }

  {
    auto f = open_in(dir / "ego.csv");
    expect_header(f, "stamp,qw,qx,qy,qz,tx,ty,tz", dir / "ego.csv");
    std::vector<Pose> poses;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 8) throw IoError("bad row in ego.csv: " + line);
      Pose p;
      p.stamp = std::stod(c[0]);
      p.rotation = Eigen::Quaterniond(std::stod(c[1]), std::stod(c[2]), std::stod(c[3]),
                                      std::stod(c[4]))
                       .normalized()
                       .toRotationMatrix();
      p.translation = Vec3(std::stod(c[5]), std::stod(c[6]), std::stod(c[7]));
      poses.push_back(p);
    }
    ds.ego = EgoTrajectory(std::move(poses));
  }

  ds.frames.reserve(ds.manifest.frame_count);
  for (int i = 0; i < ds.manifest.frame_count; ++i) {
    const fs::path p = dir / "frames" / (frame_name(i) + ".csv");
    auto f = open_in(p);
    expect_header(f, "x,y,z,stamp,object_id", p);
    RawFrame frame;
    frame.index = i;
    frame.start_stamp = i * ds.manifest.frame_duration;
    frame.ego_pose_start = ds.ego.pose_at(frame.start_stamp);
    frame.ego_pose_end = ds.ego.pose_at(frame.start_stamp + ds.manifest.frame_duration);
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 5) throw IoError("bad row in " + p.string() + ": " + line);
      TimedPoint pt;
      pt.position = Vec3(std::stod(c[0]), std::stod(c[1]), std::stod(c[2]));
      pt.stamp = std::stod(c[3]);
      pt.object_id = std::stoi(c[4]);
      frame.points.push_back(pt);
    }
    ds.frames.push_back(std::move(frame));
  }

  ds.tracks.resize(ds.manifest.frame_count);
  for (int i = 0; i < ds.manifest.frame_count; ++i) {
    const fs::path p = dir / "tracks" / (frame_name(i) + ".csv");
    if (!fs::exists(p)) continue;
    auto f = open_in(p);
    expect_header(f, "object_id,u0,v0,u1,v1,is_outlier", p);
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 6) throw IoError("bad row in " + p.string() + ": " + line);
      FeatureTrack t;
      t.object_id = std::stoi(c[0]);
      t.pixel_t0 = Vec2(std::stod(c[1]), std::stod(c[2]));
      t.pixel_t1 = Vec2(std::stod(c[3]), std::stod(c[4]));
      t.is_outlier = std::stoi(c[5]) != 0;
      ds.tracks[i].push_back(t);
    }
  }

  {
    auto f = open_in(dir / "gt.csv");
    expect_header(f, "stamp,object_id,cx,cy,cz,yaw,l,w,h,vx,vy,vz", dir / "gt.csv");
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 12) throw IoError("bad row in gt.csv: " + line);
      GtRow g;
      g.stamp = std::stod(c[0]);
      g.object_id = std::stoi(c[1]);
      g.center = Vec3(std::stod(c[2]), std::stod(c[3]), std::stod(c[4]));
      g.yaw = std::stod(c[5]);
      g.dims = Vec3(std::stod(c[6]), std::stod(c[7]), std::stod(c[8]));
      g.velocity = Vec3(std::stod(c[9]), std::stod(c[10]), std::stod(c[11]));
      ds.gt.push_back(g);
    }
  }
  return ds;
}

std::string manifest_hash(const fs::path& dataset_dir) {
  auto f = open_in(dataset_dir / "manifest.json");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace velocorr
