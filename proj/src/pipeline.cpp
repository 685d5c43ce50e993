#include "matmap/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "matmap/error.hpp"
#include "matmap/image_io.hpp"
#include "matmap/lift.hpp"
#include "matmap/mscc.hpp"
#include "matmap/ply.hpp"
#include "matmap/rng.hpp"
#include "matmap/toy_model.hpp"

namespace matmap {

namespace {
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
}  // namespace

SemanticMap segment_cloud(const PointCloud& cloud, const std::vector<BBox3D>& boxes,
                          const PipelineConfig& config) {
  const ScaleSet scales(config.scales);
  const Segmentation seg =
      mscc_segment(cloud, scales, boxes, connectivity_from_int(config.connectivity));
  return propagate_labels(seg, cloud, boxes, config.label_cutoff, config.palette);
}

RunResult run_pipeline(const RunOptions& options) {
  options.config.validate();
  RunResult result;
  StageProfiler& profile = result.profile;

  const Sequence seq = profile.time("io", [&] { return load_manifest(options.manifest_path); });

  std::unique_ptr<ToyCafnClassifier> toy;
  if (options.config.classifier == "toy-cafn") {
    if (!options.weights_path.empty()) {
      toy = std::make_unique<ToyCafnClassifier>(load_cascade_weights(options.weights_path),
                                                mix_seed(options.config.seed, 0xfeed));
    } else {
      toy = std::make_unique<ToyCafnClassifier>(ToyCafnClassifier::seeded(options.config.seed));
    }
  }

  PointCloud cloud;
  std::vector<BBox3D> boxes;
  int next_box_id = 0;

  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    if (f % static_cast<std::size_t>(options.config.keyframe_interval) != 0) continue;
    const FrameRecord& frame = seq.frames[f];

    const DepthImage depth = profile.time("io", [&] { return read_pgm16(frame.depth_path); });
    RgbImage rgb;
    bool have_rgb = false;
    if (!frame.rgb_path.empty() && fs::exists(frame.rgb_path)) {
      rgb = profile.time("io", [&] { return read_ppm(frame.rgb_path); });
      have_rgb = true;
    }

    const auto det_it = seq.detections.find(frame.frame_id);
    if (det_it != seq.detections.end()) {
      for (std::size_t d = 0; d < det_it->second.size(); ++d) {
        const Detection2D& det = det_it->second[d];

        const MaterialLabel material = profile.time("classify", [&] {
          if (toy) return toy->classify_detection(frame.frame_id, static_cast<int>(d)).label;
          if (det.material_label) return *det.material_label;
          log_warning("frame " + std::to_string(frame.frame_id) + ": detection '" +
                      det.object_label + "' has no material; using Other");
          return MaterialLabel::Other;
        });

        profile.time("detect", [&] {
          auto lifted =
              lift_detection(det, depth, seq.intrinsics, frame.pose, options.config.min_depth,
                             options.config.max_depth, material, next_box_id);
          if (lifted) {
            boxes.push_back(std::move(*lifted));
            ++next_box_id;
          } else {
            log_warning("frame " + std::to_string(frame.frame_id) + ": detection '" +
                        det.object_label + "' has no usable depth, dropped");
          }
        });
      }
    }

    profile.time("cloud", [&] {
      cloud.append(depth_to_cloud(depth, seq.intrinsics, frame.pose, options.config.stride,
                                  options.config.min_depth, options.config.max_depth,
                                  have_rgb ? &rgb : nullptr));
    });

    if (options.incremental && f + 1 < seq.frames.size()) {
      // Timing-study replay of per-frame segmentation; the final map below is
      // identical either way.
      profile.time("voxm_incremental", [&] { (void)segment_cloud(cloud, boxes, options.config); });
    }
  }

  const ScaleSet scales(options.config.scales);
  const Segmentation seg = profile.time("voxm", [&] {
    return mscc_segment(cloud, scales, boxes, connectivity_from_int(options.config.connectivity));
  });
  result.map = profile.time("propagate", [&] {
    return propagate_labels(seg, cloud, boxes, options.config.label_cutoff,
                            options.config.palette);
  });

  result.boxes = boxes;
  if (!options.groundtruth_path.empty()) {
    const GroundTruthMap gt = load_groundtruth(options.groundtruth_path);
    result.metrics = evaluate_map(result.map, result.boxes, gt);
  }
  result.metrics.n_detections = static_cast<int>(boxes.size());
  result.metrics.n_clusters = seg.num_clusters;
  return result;
}

void write_run_outputs(const RunResult& result, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_ply(result.map, (fs::path(out_dir) / "map.ply").string());
  save_boxes_json(result.boxes, (fs::path(out_dir) / "boxes.json").string());

  // metrics.json stays byte-reproducible across runs; wall-clock timings go
  // to timings.json instead.
  std::ofstream metrics((fs::path(out_dir) / "metrics.json").string());
  if (!metrics) throw IoError("cannot write metrics.json");
  metrics << result.metrics.to_json_string();

  json timings;
  json stages;
  for (const auto& [name, ms] : result.profile.stages()) stages[name] = ms;
  timings["timings_ms"] = stages;
  timings["total_ms"] = result.profile.total();
  std::ofstream tf((fs::path(out_dir) / "timings.json").string());
  if (!tf) throw IoError("cannot write timings.json");
  tf << timings.dump(2) << "\n";
}

std::vector<BBox3D> load_boxes_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  std::vector<BBox3D> boxes;
  if (!doc.contains("boxes")) throw ParseError(path, 0, "missing 'boxes' array");
  for (const json& b : doc.at("boxes")) {
    try {
      const auto& mn = b.at("min");
      const auto& mx = b.at("max");
      boxes.push_back(BBox3D(
          {mn.at(0).get<double>(), mn.at(1).get<double>(), mn.at(2).get<double>()},
          {mx.at(0).get<double>(), mx.at(1).get<double>(), mx.at(2).get<double>()},
          material_from_string(b.at("material").get<std::string>()),
          b.value("object", std::string{}), b.value("conf", 1.0), b.value("frame", -1),
          b.at("id").get<int>()));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, 0, e.what());
    } catch (const InvalidInputError& e) {
      throw ParseError(path, 0, e.what());
    }
  }
  return boxes;
}

void save_boxes_json(const std::vector<BBox3D>& boxes, const std::string& path) {
  json doc;
  json arr = json::array();
  for (const BBox3D& b : boxes) {
    json entry;
    entry["id"] = b.box_id;
    entry["min"] = {b.min_corner.x, b.min_corner.y, b.min_corner.z};
    entry["max"] = {b.max_corner.x, b.max_corner.y, b.max_corner.z};
    entry["material"] = to_string(b.material);
    entry["object"] = b.object_label;
    entry["conf"] = b.confidence;
    entry["frame"] = b.source_frame;
    arr.push_back(entry);
  }
  doc["boxes"] = arr;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace matmap
