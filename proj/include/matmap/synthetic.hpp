#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matmap/boxes.hpp"
#include "matmap/sequence.hpp"

namespace matmap {

/// One inventory row: an object kind, its raw material name (which may be
/// outside the classifier vocabulary, e.g. "fiber"), and how many instances
/// the room holds.
struct InventoryEntry {
  std::string object;
  std::string material;
  int count = 0;
};

/// The conference-room inventory used by the synthetic end-to-end fixtures:
/// 25 objects over 10 object kinds.
std::vector<InventoryEntry> conference_room_inventory();

struct SceneObject {
  std::string name;
  std::string material_name;  // raw name as it appears in the inventory
  MaterialLabel material = MaterialLabel::Other;
  BBox3D box;  // true world-frame geometry
};

/// A synthetic room: objects arranged on a wall grid facing the camera so
/// every instance is fully visible from every pose, plus the camera model.
struct SceneLayout {
  CameraIntrinsics intrinsics;
  std::vector<SceneObject> objects;
  std::vector<Pose> poses;  // one per frame
  double min_depth = 0.3;
  double max_depth = 20.0;
};

SceneLayout build_scene(const std::vector<InventoryEntry>& inventory, int frames = 3);

/// Z-buffer of the scene boxes for one pose; depth quantized to millimeters.
DepthImage render_depth(const SceneLayout& scene, const Pose& pose);

/// Flat-shaded color render (palette color per material, black background).
RgbImage render_rgb(const SceneLayout& scene, const Pose& pose, const Palette& palette);

/// Projected 2D boxes of every visible object with its true material name.
std::vector<Detection2D> perfect_detections(const SceneLayout& scene, const Pose& pose,
                                            int frame_id, std::vector<std::string>* materials);

struct FixtureOptions {
  double label_flip_rate = 0.0;  // per-detection probability of a wrong material
  std::uint64_t noise_seed = 0;
  bool write_rgb = true;
  int stride = 2;  // recorded into the fixture config
};

/// Writes a complete on-disk sequence fixture: manifest.json, depth/rgb
/// frames, detections.jsonl, gt.json (boxes inflated 1 cm so quantized
/// surface points stay inside), and config.json.
void write_scene_fixture(const SceneLayout& scene, const std::string& dir,
                         const FixtureOptions& options = {});

}  // namespace matmap
