#include "matmap/sequence.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "matmap/error.hpp"

namespace matmap {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json parse_json(const std::string& text, const std::string& path, int line_no) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, line_no, e.what());
  }
}

const json& require(const json& obj, const char* key, const std::string& path, int line_no = 0) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(path, line_no, std::string("missing required field '") + key + "'");
  return *it;
}

std::string resolve(const std::string& base_dir, const std::string& rel) {
  if (rel.empty()) return rel;
  fs::path p(rel);
  if (p.is_absolute()) return rel;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

Detection2D parse_detection(const json& box, int frame_id, int width, int height,
                            const std::string& path, int line_no, bool* keep) {
  Detection2D det;
  det.frame_id = frame_id;
  const double x = require(box, "x", path, line_no).get<double>();
  const double y = require(box, "y", path, line_no).get<double>();
  const double w = require(box, "w", path, line_no).get<double>();
  const double h = require(box, "h", path, line_no).get<double>();
  det.object_label = require(box, "label", path, line_no).get<std::string>();
  det.confidence = require(box, "conf", path, line_no).get<double>();
  if (!(w > 0.0) || !(h > 0.0))
    throw ParseError(path, line_no, "detection bbox must have positive width and height");
  if (!(det.confidence >= 0.0 && det.confidence <= 1.0))
    throw ParseError(path, line_no, "detection confidence must be in [0, 1]");
  if (box.contains("material"))
    det.material_label = material_from_string(box.at("material").get<std::string>());

  const double x0 = std::max(0.0, std::min(x, static_cast<double>(width)));
  const double y0 = std::max(0.0, std::min(y, static_cast<double>(height)));
  const double x1 = std::max(0.0, std::min(x + w, static_cast<double>(width)));
  const double y1 = std::max(0.0, std::min(y + h, static_cast<double>(height)));
  det.x = x0;
  det.y = y0;
  det.w = x1 - x0;
  det.h = y1 - y0;
  if (det.w <= 0.0 || det.h <= 0.0) {
    log_warning("frame " + std::to_string(frame_id) + ": detection '" + det.object_label +
                "' lies fully outside the image, dropped");
    *keep = false;
  } else {
    *keep = true;
  }
  return det;
}

}  // namespace

std::vector<BBox3D> GroundTruthMap::boxes() const {
  std::vector<BBox3D> out;
  out.reserve(objects.size());
  for (const GtObject& obj : objects) out.push_back(obj.box);
  return out;
}

std::map<int, std::vector<Detection2D>> load_detections(const std::string& path, int image_width,
                                                        int image_height) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::map<int, std::vector<Detection2D>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json record = parse_json(line, path, line_no);
    const int frame_id = require(record, "frame_id", path, line_no).get<int>();
    auto& dets = out[frame_id];
    for (const json& box : require(record, "boxes", path, line_no)) {
      bool keep = false;
      Detection2D det = parse_detection(box, frame_id, image_width, image_height, path, line_no, &keep);
      if (keep) dets.push_back(det);
    }
  }
  return out;
}

void save_detections(const std::map<int, std::vector<Detection2D>>& detections,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [frame_id, dets] : detections) {
    json record;
    record["frame_id"] = frame_id;
    json boxes = json::array();
    for (const Detection2D& det : dets) {
      json box;
      box["x"] = det.x;
      box["y"] = det.y;
      box["w"] = det.w;
      box["h"] = det.h;
      box["label"] = det.object_label;
      box["conf"] = det.confidence;
      if (det.material_label) box["material"] = to_string(*det.material_label);
      boxes.push_back(box);
    }
    record["boxes"] = boxes;
    out << record.dump() << "\n";
  }
}

Sequence load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const json doc = parse_json(text, path, 0);
  const std::string base_dir = fs::path(path).parent_path().string();

  Sequence seq;
  const json& intr = require(doc, "intrinsics", path);
  try {
    seq.intrinsics = CameraIntrinsics(
        require(intr, "fx", path).get<double>(), require(intr, "fy", path).get<double>(),
        require(intr, "cx", path).get<double>(), require(intr, "cy", path).get<double>(),
        require(intr, "width", path).get<int>(), require(intr, "height", path).get<int>());
  } catch (const InvalidInputError& e) {
    throw ParseError(path, 0, std::string("invalid intrinsics: ") + e.what());
  }

  std::set<int> frame_ids;
  double prev_t = 0.0;
  for (const json& frame : require(doc, "frames", path)) {
    FrameRecord rec;
    rec.frame_id = require(frame, "frame_id", path).get<int>();
    rec.timestamp = require(frame, "t", path).get<double>();
    rec.rgb_path = resolve(base_dir, require(frame, "rgb", path).get<std::string>());
    rec.depth_path = resolve(base_dir, require(frame, "depth", path).get<std::string>());
    const json& pose = require(frame, "pose", path);
    if (!pose.is_array() || pose.size() != 7)
      throw ParseError(path, 0,
                       "frame " + std::to_string(rec.frame_id) +
                           ": pose must be [tx, ty, tz, qx, qy, qz, qw]");
    try {
      rec.pose = Pose({pose[0].get<double>(), pose[1].get<double>(), pose[2].get<double>()},
                      pose[3].get<double>(), pose[4].get<double>(), pose[5].get<double>(),
                      pose[6].get<double>());
    } catch (const InvalidInputError& e) {
      throw ParseError(path, 0,
                       "frame " + std::to_string(rec.frame_id) + ": " + e.what());
    }
    if (!frame_ids.insert(rec.frame_id).second)
      throw ParseError(path, 0, "duplicate frame_id " + std::to_string(rec.frame_id));
    if (!seq.frames.empty() && !(rec.timestamp > prev_t))
      throw ParseError(path, 0,
                       "timestamps must be strictly increasing (frame " +
                           std::to_string(rec.frame_id) + ")");
    prev_t = rec.timestamp;
    seq.frames.push_back(std::move(rec));
  }

  if (doc.contains("detections")) {
    const std::string det_path = resolve(base_dir, doc.at("detections").get<std::string>());
    seq.detections = load_detections(det_path, seq.intrinsics.width, seq.intrinsics.height);
    for (const auto& [frame_id, dets] : seq.detections) {
      (void)dets;
      if (frame_ids.find(frame_id) == frame_ids.end())
        throw ParseError(det_path, 0,
                         "detections reference unknown frame_id " + std::to_string(frame_id));
    }
  }
  return seq;
}

void save_manifest(const Sequence& sequence, const std::string& path,
                   const std::string& detections_path) {
  json doc;
  json intr;
  intr["fx"] = sequence.intrinsics.fx;
  intr["fy"] = sequence.intrinsics.fy;
  intr["cx"] = sequence.intrinsics.cx;
  intr["cy"] = sequence.intrinsics.cy;
  intr["width"] = sequence.intrinsics.width;
  intr["height"] = sequence.intrinsics.height;
  doc["intrinsics"] = intr;
  json frames = json::array();
  for (const FrameRecord& rec : sequence.frames) {
    json frame;
    frame["frame_id"] = rec.frame_id;
    frame["t"] = rec.timestamp;
    frame["rgb"] = rec.rgb_path;
    frame["depth"] = rec.depth_path;
    frame["pose"] = {rec.pose.translation().x, rec.pose.translation().y,
                     rec.pose.translation().z, rec.pose.qx(),
                     rec.pose.qy(),             rec.pose.qz(),
                     rec.pose.qw()};
    frames.push_back(frame);
  }
  doc["frames"] = frames;
  if (!detections_path.empty()) doc["detections"] = detections_path;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

GroundTruthMap load_groundtruth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const json doc = parse_json(text, path, 0);

  GroundTruthMap gt;
  std::set<int> ids;
  if (doc.contains("objects")) {
    for (const json& obj : doc.at("objects")) {
      GtObject entry;
      entry.id = require(obj, "id", path).get<int>();
      if (!ids.insert(entry.id).second)
        throw ParseError(path, 0, "duplicate object id " + std::to_string(entry.id));
      entry.object_label = require(obj, "object", path).get<std::string>();
      entry.material = material_from_string(require(obj, "material", path).get<std::string>());
      const json& mn = require(obj, "min", path);
      const json& mx = require(obj, "max", path);
      if (!mn.is_array() || mn.size() != 3 || !mx.is_array() || mx.size() != 3)
        throw ParseError(path, 0,
                         "object " + std::to_string(entry.id) + ": min/max must be [x, y, z]");
      try {
        entry.box = BBox3D({mn[0].get<double>(), mn[1].get<double>(), mn[2].get<double>()},
                           {mx[0].get<double>(), mx[1].get<double>(), mx[2].get<double>()},
                           entry.material, entry.object_label, 1.0, -1, entry.id);
      } catch (const InvalidInputError& e) {
        throw ParseError(path, 0, "object " + std::to_string(entry.id) + ": " + e.what());
      }
      gt.objects.push_back(std::move(entry));
    }
  }
  if (doc.contains("point_labels")) {
    for (const json& label : doc.at("point_labels")) {
      gt.point_labels.push_back(material_from_string(label.get<std::string>()));
    }
  }
  if (!gt.has_boxes() && !gt.has_point_labels())
    throw ParseError(path, 0, "ground truth requires at least one labeled object or point label");
  return gt;
}

void save_groundtruth(const GroundTruthMap& gt, const std::string& path,
                      const std::vector<std::string>& material_names) {
  json doc;
  if (gt.has_boxes()) {
    json objects = json::array();
    for (std::size_t i = 0; i < gt.objects.size(); ++i) {
      const GtObject& obj = gt.objects[i];
      json entry;
      entry["id"] = obj.id;
      entry["object"] = obj.object_label;
      entry["material"] =
          i < material_names.size() ? material_names[i] : to_string(obj.material);
      entry["min"] = {obj.box.min_corner.x, obj.box.min_corner.y, obj.box.min_corner.z};
      entry["max"] = {obj.box.max_corner.x, obj.box.max_corner.y, obj.box.max_corner.z};
      objects.push_back(entry);
    }
    doc["objects"] = objects;
  }
  if (gt.has_point_labels()) {
    json labels = json::array();
    for (MaterialLabel label : gt.point_labels) labels.push_back(to_string(label));
    doc["point_labels"] = labels;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace matmap
