#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matmap/boxes.hpp"
#include "matmap/semantic_map.hpp"
#include "matmap/sequence.hpp"

namespace matmap {

struct ClassMetrics {
  std::optional<double> iou;  // absent when the class has no point support
  std::optional<double> ap;   // absent when the class has no gt instances
  int n_gt = 0;
  int n_det = 0;
  int tp = 0;
  int fp = 0;
};

struct MetricsReport {
  std::map<MaterialLabel, ClassMetrics> per_class;
  std::optional<double> mean_iou;
  std::optional<double> map;  // mean average precision
  int n_detections = 0;
  int tp = 0;
  int fp = 0;
  int n_clusters = 0;
  std::string gt_mode;  // "boxes", "point_labels", or "" when no gt was used
  std::vector<std::pair<std::string, double>> timings_ms;

  std::string to_json_string() const;  // schema documented in the README
};

/// Ground-truth material per point: the aligned per-point labels when
/// present, otherwise rasterized gt boxes (a point inside several boxes takes
/// the smallest-volume one; outside all boxes it is Other).
std::vector<MaterialLabel> gt_point_labels(const GroundTruthMap& gt, const PointCloud& cloud);

/// Point-set IoU per material over the classes present in prediction or
/// ground truth; classes absent from both are omitted.
std::map<MaterialLabel, double> iou_per_class(const SemanticMap& pred, const GroundTruthMap& gt);

struct DetectionMatch {
  int pred_index = -1;
  bool tp = false;
  int gt_index = -1;  // -1 for false positives
  double iou = 0.0;
};

struct MatchResult {
  std::vector<DetectionMatch> matches;  // in greedy (confidence-descending) order
  int tp = 0;
  int fp = 0;
};

/// Greedy matching by descending confidence (ties: smaller box_id first). A
/// prediction is a true positive when its volume IoU with an unmatched gt box
/// of the same material reaches the threshold; each gt box matches at most once.
MatchResult match_detections(const std::vector<BBox3D>& pred_boxes,
                             const std::vector<BBox3D>& gt_boxes, double iou_threshold);

struct RankedDetection {
  double confidence = 0.0;
  int order = 0;  // tie-break key (box_id)
  bool tp = false;
};

/// Area under the precision-recall curve, all-point interpolation.
double average_precision(std::vector<RankedDetection> detections, int n_gt);

/// Row = ground truth, column = prediction, kMaterialCount x kMaterialCount.
using ConfusionMatrix = std::array<std::array<int, kMaterialCount>, kMaterialCount>;
ConfusionMatrix confusion_matrix(const std::vector<MaterialLabel>& gt_labels,
                                 const std::vector<MaterialLabel>& pred_labels);

inline constexpr double kDefaultIouThreshold = 0.5;

/// Full report: per-class IoU from the map, per-class AP/mAP from box
/// matching at the given threshold. Classes with zero gt instances are
/// excluded from mAP (logged).
MetricsReport evaluate_map(const SemanticMap& pred, const std::vector<BBox3D>& pred_boxes,
                           const GroundTruthMap& gt,
                           double iou_threshold = kDefaultIouThreshold);

/// Derives one box per cluster (AABB of its points, confidence 1) so a map
/// can be matched against gt boxes when no detector boxes are available.
std::vector<BBox3D> cluster_boxes(const SemanticMap& map);

}  // namespace matmap
