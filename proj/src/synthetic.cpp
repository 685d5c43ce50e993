#include "matmap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "matmap/config.hpp"
#include "matmap/error.hpp"
#include "matmap/image_io.hpp"
#include "matmap/rng.hpp"

namespace matmap {

namespace fs = std::filesystem;

std::vector<InventoryEntry> conference_room_inventory() {
  return {
      {"cloth sheet", "cloth", 1}, {"cardboard box", "cardboard", 8},
      {"chair", "fiber", 3},       {"door", "wood", 2},
      {"desk", "wood", 3},         {"mat", "rubber", 1},
      {"plastic board", "plastic", 1}, {"screen", "polyester", 1},
      {"poster", "paper", 3},      {"robot", "metal", 2},
  };
}

namespace {

// Lateral half-extents (meters) per object kind; anything unlisted gets 0.4.
double half_extent_for(const std::string& object) {
  if (object == "door") return 0.48;
  if (object == "desk") return 0.45;
  if (object == "poster") return 0.3;
  if (object == "mat") return 0.42;
  if (object == "robot") return 0.25;
  if (object == "chair") return 0.3;
  return 0.4;
}

double depth_extent_for(const std::string& object) {
  if (object == "poster") return 0.04;
  if (object == "plastic board") return 0.06;
  if (object == "screen") return 0.08;
  if (object == "robot") return 0.35;
  return 0.3;
}

struct RayHit {
  double t = 0.0;
  int object = -1;
};

// Slab intersection against every box; returns the nearest hit along the ray
// origin + t * dir with t >= t_min.
RayHit cast_ray(const SceneLayout& scene, const Point3& origin, const Point3& dir, double t_min) {
  RayHit best;
  best.t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const BBox3D& box = scene.objects[i].box;
    double lo = t_min, hi = best.t;
    bool miss = false;
    const double o[3] = {origin.x, origin.y, origin.z};
    const double d[3] = {dir.x, dir.y, dir.z};
    const double mn[3] = {box.min_corner.x, box.min_corner.y, box.min_corner.z};
    const double mx[3] = {box.max_corner.x, box.max_corner.y, box.max_corner.z};
    for (int axis = 0; axis < 3 && !miss; ++axis) {
      if (d[axis] == 0.0) {
        if (o[axis] < mn[axis] || o[axis] > mx[axis]) miss = true;
        continue;
      }
      double t0 = (mn[axis] - o[axis]) / d[axis];
      double t1 = (mx[axis] - o[axis]) / d[axis];
      if (t0 > t1) std::swap(t0, t1);
      lo = std::max(lo, t0);
      hi = std::min(hi, t1);
      if (lo > hi) miss = true;
    }
    if (!miss && lo < best.t) {
      best.t = lo;
      best.object = static_cast<int>(i);
    }
  }
  if (!std::isfinite(best.t)) best.object = -1;
  return best;
}

}  // namespace

SceneLayout build_scene(const std::vector<InventoryEntry>& inventory, int frames) {
  if (frames < 1) throw InvalidInputError("scene needs at least one frame");
  SceneLayout scene;
  scene.intrinsics = CameraIntrinsics(200.0, 200.0, 159.5, 119.5, 320, 240);
  scene.min_depth = 0.3;
  scene.max_depth = 20.0;

  int total = 0;
  for (const InventoryEntry& entry : inventory) total += entry.count;
  // 5-column wall grid at z = 8 m; 2.5 m x 2.2 m pitch keeps instances more
  // than three coarse voxels apart so clusters never bridge objects.
  const int columns = 5;
  const int rows = (total + columns - 1) / columns;
  const double pitch_x = 2.5, pitch_y = 2.2;
  const double wall_z = 8.0;

  int slot = 0;
  for (const InventoryEntry& entry : inventory) {
    for (int k = 0; k < entry.count; ++k, ++slot) {
      const int col = slot % columns;
      const int row = slot / columns;
      const double cx = (col - (columns - 1) / 2.0) * pitch_x;
      const double cy = (row - (rows - 1) / 2.0) * pitch_y;
      const double he = half_extent_for(entry.object);
      const double de = depth_extent_for(entry.object);
      SceneObject obj;
      obj.name = entry.object + " " + std::to_string(k + 1);
      obj.material_name = entry.material;
      obj.material = material_from_string(entry.material, /*warn=*/false);
      obj.box = BBox3D({cx - he, cy - he, wall_z}, {cx + he, cy + he, wall_z + de}, obj.material,
                       obj.name, 1.0, -1, slot);
      scene.objects.push_back(std::move(obj));
    }
  }

  // Small lateral shifts; rotations stay identity so rays are cheap and the
  // viewpoint change is still exercised through the translation.
  for (int f = 0; f < frames; ++f) {
    const double dx = 0.11 * f - 0.05 * (f % 2);
    const double dy = 0.07 * ((f * 2) % 3);
    scene.poses.emplace_back(Point3{dx, dy, 0.0}, 0.0, 0.0, 0.0, 1.0);
  }
  return scene;
}

DepthImage render_depth(const SceneLayout& scene, const Pose& pose) {
  const CameraIntrinsics& intr = scene.intrinsics;
  DepthImage depth(intr.width, intr.height, 0);
  const Point3 origin = pose.translation();
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Point3 dir_cam{(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0};
      const Point3 dir = transform_point(Pose({0, 0, 0}, pose.qx(), pose.qy(), pose.qz(), pose.qw()),
                                         dir_cam);
      const RayHit hit = cast_ray(scene, origin, dir, scene.min_depth);
      if (hit.object < 0) continue;
      // dir_cam.z == 1, so the ray parameter equals camera-frame depth.
      const double mm = std::round(hit.t * 1000.0);
      if (mm < 1.0 || mm > 65535.0) continue;
      depth.at(u, v) = static_cast<std::uint16_t>(mm);
    }
  }
  return depth;
}

RgbImage render_rgb(const SceneLayout& scene, const Pose& pose, const Palette& palette) {
  const CameraIntrinsics& intr = scene.intrinsics;
  RgbImage image(intr.width, intr.height, {0, 0, 0});
  const Point3 origin = pose.translation();
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Point3 dir_cam{(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0};
      const Point3 dir = transform_point(Pose({0, 0, 0}, pose.qx(), pose.qy(), pose.qz(), pose.qw()),
                                         dir_cam);
      const RayHit hit = cast_ray(scene, origin, dir, scene.min_depth);
      if (hit.object < 0) continue;
      image.at(u, v) = palette.color(scene.objects[hit.object].material);
    }
  }
  return image;
}

std::vector<Detection2D> perfect_detections(const SceneLayout& scene, const Pose& pose,
                                            int frame_id, std::vector<std::string>* materials) {
  const CameraIntrinsics& intr = scene.intrinsics;
  // World-to-camera for identity-rotation poses is a translation.
  const Point3 cam_origin = pose.translation();
  std::vector<Detection2D> dets;
  for (const SceneObject& obj : scene.objects) {
    double u0 = 1e30, v0 = 1e30, u1 = -1e30, v1 = -1e30;
    bool ok = true;
    for (int corner = 0; corner < 8 && ok; ++corner) {
      const Point3 w{(corner & 1) ? obj.box.max_corner.x : obj.box.min_corner.x,
                     (corner & 2) ? obj.box.max_corner.y : obj.box.min_corner.y,
                     (corner & 4) ? obj.box.max_corner.z : obj.box.min_corner.z};
      const Point3 cam = w - cam_origin;
      if (!(cam.z > 0.0)) {
        ok = false;
        break;
      }
      const auto uv = project_point(cam, intr);
      u0 = std::min(u0, uv[0]);
      v0 = std::min(v0, uv[1]);
      u1 = std::max(u1, uv[0]);
      v1 = std::max(v1, uv[1]);
    }
    if (!ok) continue;
    Detection2D det;
    det.frame_id = frame_id;
    det.x = std::max(0.0, u0);
    det.y = std::max(0.0, v0);
    det.w = std::min(static_cast<double>(intr.width), u1) - det.x;
    det.h = std::min(static_cast<double>(intr.height), v1) - det.y;
    if (det.w <= 0.0 || det.h <= 0.0) continue;
    det.object_label = obj.name;
    det.confidence = 1.0;
    det.material_label = obj.material;
    dets.push_back(det);
    if (materials) materials->push_back(obj.material_name);
  }
  return dets;
}

void write_scene_fixture(const SceneLayout& scene, const std::string& dir,
                         const FixtureOptions& options) {
  fs::create_directories(dir);
  const Palette palette;

  Sequence seq;
  seq.intrinsics = scene.intrinsics;
  std::map<int, std::vector<Detection2D>> detections;
  DetRng noise(options.noise_seed);

  const std::vector<std::string> vocab = {"cloth",  "cardboard", "fiber",  "wood", "rubber",
                                          "plastic", "polyester", "paper", "metal"};

  for (std::size_t f = 0; f < scene.poses.size(); ++f) {
    const Pose& pose = scene.poses[f];
    char name[32];
    std::snprintf(name, sizeof(name), "depth_%03zu.pgm", f);
    const std::string depth_rel = name;
    write_pgm16(render_depth(scene, pose), (fs::path(dir) / depth_rel).string());

    std::string rgb_rel;
    if (options.write_rgb) {
      std::snprintf(name, sizeof(name), "rgb_%03zu.ppm", f);
      rgb_rel = name;
      write_ppm(render_rgb(scene, pose, palette), (fs::path(dir) / rgb_rel).string());
    }

    FrameRecord rec;
    rec.frame_id = static_cast<int>(f);
    rec.timestamp = 0.1 * static_cast<double>(f);
    rec.rgb_path = rgb_rel;
    rec.depth_path = depth_rel;
    rec.pose = pose;
    seq.frames.push_back(rec);

    std::vector<std::string> raw_materials;
    std::vector<Detection2D> dets =
        perfect_detections(scene, pose, rec.frame_id, &raw_materials);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      std::string material = raw_materials[d];
      if (options.label_flip_rate > 0.0 && noise.uniform() < options.label_flip_rate) {
        std::string flipped = material;
        while (flipped == material)
          flipped = vocab[noise.uniform_int(vocab.size())];
        material = flipped;
      }
      dets[d].material_label = material_from_string(material, /*warn=*/false);
      detections[rec.frame_id].push_back(dets[d]);
    }
  }

  save_detections(detections, (fs::path(dir) / "detections.jsonl").string());
  save_manifest(seq, (fs::path(dir) / "manifest.json").string(), "detections.jsonl");

  GroundTruthMap gt;
  std::vector<std::string> raw_names;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& obj = scene.objects[i];
    GtObject entry;
    entry.id = static_cast<int>(i);
    entry.object_label = obj.name;
    entry.material = obj.material;
    // Inflate 1 cm so millimeter-quantized surface points stay inside.
    const Point3 pad{0.01, 0.01, 0.01};
    entry.box = BBox3D(obj.box.min_corner - pad, obj.box.max_corner + pad, obj.material, obj.name,
                       1.0, -1, entry.id);
    gt.objects.push_back(entry);
    raw_names.push_back(obj.material_name);
  }
  save_groundtruth(gt, (fs::path(dir) / "gt.json").string(), raw_names);

  PipelineConfig config;
  config.stride = options.stride;
  config.min_depth = scene.min_depth;
  config.max_depth = scene.max_depth;
  save_config(config, (fs::path(dir) / "config.json").string());
}

}  // namespace matmap
