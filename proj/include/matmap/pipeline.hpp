#pragma once

#include <string>
#include <vector>

#include "matmap/config.hpp"
#include "matmap/metrics.hpp"
#include "matmap/profiling.hpp"
#include "matmap/semantic_map.hpp"
#include "matmap/sequence.hpp"

namespace matmap {

struct RunOptions {
  std::string manifest_path;
  std::string groundtruth_path;  // optional; enables IoU/mAP in the metrics
  std::string weights_path;      // optional; toy-cafn weights (seeded when empty)
  PipelineConfig config;
  bool incremental = false;  // re-segment after every keyframe (timing studies)
};

struct RunResult {
  SemanticMap map;
  std::vector<BBox3D> boxes;  // lifted detections, ids in ingestion order
  MetricsReport metrics;      // timing-free; see profile
  StageProfiler profile;
};

/// Ingests every keyframe (detect, classify, lift, accumulate cloud), then
/// segments once over the accumulated cloud, propagates labels, colorizes
/// and evaluates. Deterministic given (options, inputs).
RunResult run_pipeline(const RunOptions& options);

/// map.ply, boxes.json and metrics.json (deterministic) plus timings.json
/// (wall clock) under out_dir, which is created if needed.
void write_run_outputs(const RunResult& result, const std::string& out_dir);

/// The standalone segment stage: mscc_segment + propagate_labels + colorize.
SemanticMap segment_cloud(const PointCloud& cloud, const std::vector<BBox3D>& boxes,
                          const PipelineConfig& config);

// Box list JSON used by the segment/evaluate subcommands:
// {"boxes":[{"id","min":[3],"max":[3],"material","object","conf","frame"}]}
std::vector<BBox3D> load_boxes_json(const std::string& path);
void save_boxes_json(const std::vector<BBox3D>& boxes, const std::string& path);

}  // namespace matmap
