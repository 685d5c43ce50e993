#pragma once

#include <string>
#include <vector>

#include "matmap/boxes.hpp"
#include "matmap/materials.hpp"
#include "matmap/segmentation.hpp"

namespace matmap {

/// Point cloud in which every point carries a cluster id, a material label,
/// an optional object label (empty = none), and a display color.
struct SemanticMap {
  PointCloud cloud;
  std::vector<std::int32_t> cluster_ids;  // -1 = unlabeled
  std::vector<MaterialLabel> materials;
  std::vector<std::string> object_labels;
  std::vector<Rgb> colors;

  std::size_t size() const { return cloud.size(); }
  bool empty() const { return cloud.empty(); }

  /// Throws InvalidInputError unless all per-point arrays share one length.
  void validate() const;
};

/// Builds an unlabeled map from a bare cloud (materials Other, clusters -1).
SemanticMap semantic_map_from_cloud(PointCloud cloud, const Palette& palette = Palette());

/// Assigns each cluster the material and object label of the box nearest to
/// its centroid; clusters farther than label_cutoff from every box (and all
/// clusters when boxes is empty) become Other. Colors come from the palette.
SemanticMap propagate_labels(const Segmentation& seg, const PointCloud& cloud,
                             const std::vector<BBox3D>& boxes, double label_cutoff = 0.5,
                             const Palette& palette = Palette());

/// Recolors every point as palette(material); geometry and labels untouched.
SemanticMap colorize(SemanticMap map, const Palette& palette);

}  // namespace matmap
