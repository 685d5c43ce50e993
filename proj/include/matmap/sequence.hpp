#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matmap/boxes.hpp"
#include "matmap/geometry.hpp"
#include "matmap/materials.hpp"

namespace matmap {

/// One 2D object detection on a frame. The bbox is clamped to the image at
/// load time; material_label is present when detections were pre-classified.
struct Detection2D {
  int frame_id = 0;
  double x = 0, y = 0, w = 0, h = 0;  // pixels
  std::string object_label;
  double confidence = 1.0;
  std::optional<MaterialLabel> material_label;
};

struct FrameRecord {
  int frame_id = 0;
  double timestamp = 0.0;  // seconds
  std::string rgb_path;    // may be empty (no color stream)
  std::string depth_path;
  Pose pose;
};

/// A recorded RGB-D sequence: intrinsics, ordered frames, and per-frame
/// detections. Loaded structures are immutable by convention.
struct Sequence {
  CameraIntrinsics intrinsics;
  std::vector<FrameRecord> frames;
  std::map<int, std::vector<Detection2D>> detections;
};

struct GtObject {
  int id = 0;
  std::string object_label;
  MaterialLabel material = MaterialLabel::Other;
  BBox3D box;
};

/// Ground truth as labeled 3D boxes and/or per-point labels aligned to a
/// reference cloud. At least one representation is always present.
struct GroundTruthMap {
  std::vector<GtObject> objects;
  std::vector<MaterialLabel> point_labels;

  bool has_boxes() const { return !objects.empty(); }
  bool has_point_labels() const { return !point_labels.empty(); }
  std::vector<BBox3D> boxes() const;
};

// Manifest: one JSON document with keys `intrinsics{fx,fy,cx,cy,width,height}`,
// `frames:[{frame_id,t,rgb,depth,pose:[tx,ty,tz,qx,qy,qz,qw]}]` and an
// optional `detections` path (JSON lines, resolved relative to the manifest).
Sequence load_manifest(const std::string& path);
void save_manifest(const Sequence& sequence, const std::string& path,
                   const std::string& detections_path = "");

// Detections: JSON lines, one frame per line:
// {"frame_id":N,"boxes":[{"x":..,"y":..,"w":..,"h":..,"label":"..","conf":..,"material":".."}]}
std::map<int, std::vector<Detection2D>> load_detections(const std::string& path, int image_width,
                                                        int image_height);
void save_detections(const std::map<int, std::vector<Detection2D>>& detections,
                     const std::string& path);

// Ground truth: one JSON document with `objects:[{id,object,material,min:[3],max:[3]}]`
// and/or `point_labels:["Wood",...]`.
GroundTruthMap load_groundtruth(const std::string& path);
void save_groundtruth(const GroundTruthMap& gt, const std::string& path,
                      const std::vector<std::string>& material_names = {});

}  // namespace matmap
