#include "matmap/semantic_map.hpp"

#include "matmap/error.hpp"

namespace matmap {

void SemanticMap::validate() const {
  const std::size_t n = cloud.size();
  if (cluster_ids.size() != n || materials.size() != n || object_labels.size() != n ||
      colors.size() != n)
    throw InvalidInputError("semantic map per-point arrays must match the cloud size");
}

SemanticMap semantic_map_from_cloud(PointCloud cloud, const Palette& palette) {
  SemanticMap map;
  const std::size_t n = cloud.size();
  map.cloud = std::move(cloud);
  map.cluster_ids.assign(n, -1);
  map.materials.assign(n, MaterialLabel::Other);
  map.object_labels.assign(n, "");
  map.colors.assign(n, palette.color(MaterialLabel::Other));
  return map;
}

SemanticMap propagate_labels(const Segmentation& seg, const PointCloud& cloud,
                             const std::vector<BBox3D>& boxes, double label_cutoff,
                             const Palette& palette) {
  const std::size_t n = cloud.size();
  if (seg.size() != n)
    throw InvalidInputError("segmentation does not cover the cloud");

  // Cluster centroids.
  std::vector<Point3> centroid(seg.num_clusters, Point3{});
  std::vector<std::size_t> count(seg.num_clusters, 0);
  for (std::size_t p = 0; p < n; ++p) {
    const std::int32_t c = seg.cluster_of_point[p];
    if (c < 0) continue;
    centroid[c] = centroid[c] + cloud.points[p];
    ++count[c];
  }

  std::vector<MaterialLabel> cluster_material(seg.num_clusters, MaterialLabel::Other);
  std::vector<std::string> cluster_object(seg.num_clusters, "");
  if (boxes.empty()) {
    if (seg.num_clusters > 0)
      log_warning("no boxes available; all clusters labeled Other");
  } else {
    for (std::int32_t c = 0; c < seg.num_clusters; ++c) {
      if (count[c] == 0) continue;
      const Point3 ctr = centroid[c] * (1.0 / static_cast<double>(count[c]));
      const std::size_t b = nearest_box(ctr, boxes);
      if (distance_to_box(ctr, boxes[b]) <= label_cutoff) {
        cluster_material[c] = boxes[b].material;
        cluster_object[c] = boxes[b].object_label;
      }
    }
  }

  SemanticMap map;
  map.cloud = cloud;
  map.cluster_ids = seg.cluster_of_point;
  map.materials.resize(n);
  map.object_labels.resize(n);
  map.colors.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::int32_t c = seg.cluster_of_point[p];
    const MaterialLabel m = c < 0 ? MaterialLabel::Other : cluster_material[c];
    map.materials[p] = m;
    map.object_labels[p] = c < 0 ? "" : cluster_object[c];
    map.colors[p] = palette.color(m);
  }
  return map;
}

SemanticMap colorize(SemanticMap map, const Palette& palette) {
  map.validate();
  for (std::size_t p = 0; p < map.size(); ++p) {
    map.colors[p] = palette.color(map.materials[p]);
  }
  return map;
}

}  // namespace matmap
