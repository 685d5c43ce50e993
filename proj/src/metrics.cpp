#include "matmap/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "matmap/error.hpp"

namespace matmap {

namespace {
using json = nlohmann::ordered_json;
}

std::vector<MaterialLabel> gt_point_labels(const GroundTruthMap& gt, const PointCloud& cloud) {
  if (gt.has_point_labels()) {
    if (gt.point_labels.size() != cloud.size())
      throw InvalidInputError("ground-truth point labels cover " +
                              std::to_string(gt.point_labels.size()) + " points, map has " +
                              std::to_string(cloud.size()));
    return gt.point_labels;
  }
  if (!gt.has_boxes()) throw InvalidInputError("ground truth holds neither boxes nor labels");

  std::vector<MaterialLabel> labels(cloud.size(), MaterialLabel::Other);
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    double best_volume = 0.0;
    bool found = false;
    for (const GtObject& obj : gt.objects) {
      if (!obj.box.contains(cloud.points[p])) continue;
      // Overlapping boxes: the smaller (more specific) object wins.
      if (!found || obj.box.volume() < best_volume) {
        labels[p] = obj.material;
        best_volume = obj.box.volume();
        found = true;
      }
    }
  }
  return labels;
}

std::map<MaterialLabel, double> iou_per_class(const SemanticMap& pred, const GroundTruthMap& gt) {
  pred.validate();
  const std::vector<MaterialLabel> gt_labels = gt_point_labels(gt, pred.cloud);

  std::array<std::size_t, kMaterialCount> inter{}, pred_n{}, gt_n{};
  for (std::size_t p = 0; p < pred.size(); ++p) {
    const std::size_t pi = material_id(pred.materials[p]);
    const std::size_t gi = material_id(gt_labels[p]);
    ++pred_n[pi];
    ++gt_n[gi];
    if (pi == gi) ++inter[pi];
  }

  std::map<MaterialLabel, double> out;
  for (int m = 0; m < kMaterialCount; ++m) {
    const std::size_t uni = pred_n[m] + gt_n[m] - inter[m];
    if (uni == 0) continue;  // class absent from both sides
    out[static_cast<MaterialLabel>(m)] =
        static_cast<double>(inter[m]) / static_cast<double>(uni);
  }
  return out;
}

MatchResult match_detections(const std::vector<BBox3D>& pred_boxes,
                             const std::vector<BBox3D>& gt_boxes, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw InvalidInputError("iou threshold must be in (0, 1]");

  std::vector<int> order(pred_boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pred_boxes[a].confidence != pred_boxes[b].confidence)
      return pred_boxes[a].confidence > pred_boxes[b].confidence;
    return pred_boxes[a].box_id < pred_boxes[b].box_id;
  });

  std::vector<bool> gt_used(gt_boxes.size(), false);
  MatchResult result;
  for (int pi : order) {
    DetectionMatch match;
    match.pred_index = pi;
    double best_iou = 0.0;
    int best_gt = -1;
    for (std::size_t gi = 0; gi < gt_boxes.size(); ++gi) {
      if (gt_used[gi] || gt_boxes[gi].material != pred_boxes[pi].material) continue;
      const double iou = box_iou(pred_boxes[pi], gt_boxes[gi]);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt >= 0 && best_iou >= iou_threshold) {
      match.tp = true;
      match.gt_index = best_gt;
      match.iou = best_iou;
      gt_used[best_gt] = true;
      ++result.tp;
    } else {
      ++result.fp;
    }
    result.matches.push_back(match);
  }
  return result;
}

double average_precision(std::vector<RankedDetection> detections, int n_gt) {
  if (n_gt < 1) throw InvalidInputError("average precision requires >= 1 gt instance");
  std::sort(detections.begin(), detections.end(), [](const RankedDetection& a, const RankedDetection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.order < b.order;
  });

  const std::size_t n = detections.size();
  if (n == 0) return 0.0;
  std::vector<double> precision(n), recall(n);
  int tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (detections[k].tp) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  // All-point interpolation: integrate the upper precision envelope.
  for (std::size_t k = n - 1; k-- > 0;) {
    precision[k] = std::max(precision[k], precision[k + 1]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

ConfusionMatrix confusion_matrix(const std::vector<MaterialLabel>& gt_labels,
                                 const std::vector<MaterialLabel>& pred_labels) {
  if (gt_labels.size() != pred_labels.size())
    throw InvalidInputError("confusion matrix requires equal-length label sequences");
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < gt_labels.size(); ++i) {
    ++m[material_id(gt_labels[i])][material_id(pred_labels[i])];
  }
  return m;
}

std::vector<BBox3D> cluster_boxes(const SemanticMap& map) {
  map.validate();
  std::int32_t max_cluster = -1;
  for (std::int32_t c : map.cluster_ids) max_cluster = std::max(max_cluster, c);
  std::vector<Point3> lo(max_cluster + 1), hi(max_cluster + 1);
  std::vector<MaterialLabel> mat(max_cluster + 1, MaterialLabel::Other);
  std::vector<std::string> obj(max_cluster + 1);
  std::vector<bool> seen(max_cluster + 1, false);
  for (std::size_t p = 0; p < map.size(); ++p) {
    const std::int32_t c = map.cluster_ids[p];
    if (c < 0) continue;
    const Point3& pt = map.cloud.points[p];
    if (!seen[c]) {
      lo[c] = hi[c] = pt;
      mat[c] = map.materials[p];
      obj[c] = map.object_labels[p];
      seen[c] = true;
    } else {
      lo[c] = {std::min(lo[c].x, pt.x), std::min(lo[c].y, pt.y), std::min(lo[c].z, pt.z)};
      hi[c] = {std::max(hi[c].x, pt.x), std::max(hi[c].y, pt.y), std::max(hi[c].z, pt.z)};
    }
  }
  std::vector<BBox3D> boxes;
  for (std::int32_t c = 0; c <= max_cluster; ++c) {
    if (!seen[c]) continue;
    boxes.push_back(BBox3D(lo[c], hi[c], mat[c], obj[c], 1.0, -1, c));
  }
  return boxes;
}

MetricsReport evaluate_map(const SemanticMap& pred, const std::vector<BBox3D>& pred_boxes,
                           const GroundTruthMap& gt, double iou_threshold) {
  MetricsReport report;
  report.gt_mode = gt.has_point_labels() ? "point_labels" : "boxes";
  report.n_detections = static_cast<int>(pred_boxes.size());

  for (std::int32_t c : pred.cluster_ids) report.n_clusters = std::max(report.n_clusters, c + 1);

  const std::map<MaterialLabel, double> ious = iou_per_class(pred, gt);
  double iou_sum = 0.0;
  for (const auto& [label, iou] : ious) {
    report.per_class[label].iou = iou;
    iou_sum += iou;
  }
  if (!ious.empty()) report.mean_iou = iou_sum / static_cast<double>(ious.size());

  if (gt.has_boxes()) {
    const std::vector<BBox3D> gt_boxes = gt.boxes();
    const MatchResult matching = match_detections(pred_boxes, gt_boxes, iou_threshold);
    report.tp = matching.tp;
    report.fp = matching.fp;

    std::array<int, kMaterialCount> n_gt{};
    for (const BBox3D& b : gt_boxes) ++n_gt[material_id(b.material)];
    std::array<std::vector<RankedDetection>, kMaterialCount> ranked;
    for (const DetectionMatch& m : matching.matches) {
      const BBox3D& b = pred_boxes[m.pred_index];
      ranked[material_id(b.material)].push_back({b.confidence, b.box_id, m.tp});
      ClassMetrics& cm = report.per_class[b.material];
      ++cm.n_det;
      if (m.tp) {
        ++cm.tp;
      } else {
        ++cm.fp;
      }
    }
    double ap_sum = 0.0;
    int ap_classes = 0;
    for (int m = 0; m < kMaterialCount; ++m) {
      const MaterialLabel label = static_cast<MaterialLabel>(m);
      if (n_gt[m] == 0) {
        if (!ranked[m].empty())
          log_warning("class " + to_string(label) + " has detections but no gt; excluded from mAP");
        continue;
      }
      const double ap = average_precision(ranked[m], n_gt[m]);
      report.per_class[label].ap = ap;
      report.per_class[label].n_gt = n_gt[m];
      ap_sum += ap;
      ++ap_classes;
    }
    if (ap_classes > 0) report.map = ap_sum / static_cast<double>(ap_classes);
  }
  return report;
}

std::string MetricsReport::to_json_string() const {
  json doc;
  json per;
  for (const auto& [label, cm] : per_class) {
    json entry;
    if (cm.iou) entry["iou"] = *cm.iou;
    if (cm.ap) entry["ap"] = *cm.ap;
    entry["n_gt"] = cm.n_gt;
    entry["n_det"] = cm.n_det;
    entry["tp"] = cm.tp;
    entry["fp"] = cm.fp;
    per[to_string(label)] = entry;
  }
  doc["per_class"] = per;
  if (mean_iou) doc["mean_iou"] = *mean_iou;
  if (map) doc["map"] = *map;
  doc["n_detections"] = n_detections;
  doc["tp"] = tp;
  doc["fp"] = fp;
  doc["n_clusters"] = n_clusters;
  if (!gt_mode.empty()) doc["gt_mode"] = gt_mode;
  if (!timings_ms.empty()) {
    json t;
    for (const auto& [name, ms] : timings_ms) t[name] = ms;
    doc["timings_ms"] = t;
  }
  return doc.dump(2) + "\n";
}

}  // namespace matmap
