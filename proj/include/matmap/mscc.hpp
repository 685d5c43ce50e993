#pragma once

#include <vector>

#include "matmap/boxes.hpp"
#include "matmap/materials.hpp"
#include "matmap/segmentation.hpp"

namespace matmap {

/// Strictly decreasing sequence of voxel edge lengths, coarse to fine.
class ScaleSet {
 public:
  explicit ScaleSet(std::vector<double> scales);

  const std::vector<double>& scales() const { return scales_; }
  std::size_t size() const { return scales_.size(); }
  double coarsest() const { return scales_.front(); }
  double finest() const { return scales_.back(); }

 private:
  std::vector<double> scales_;
};

/// Nearest-box material for each occupied cell, queried at the voxel center.
/// With no boxes every cell is labeled Other.
std::vector<MaterialLabel> provisional_cell_labels(const VoxelGrid& grid,
                                                   const std::vector<BBox3D>& boxes);

/// Cross-scale merge: base clusters (finest scale, last entry) are united iff
/// they share a component at some coarser scale and their provisional labels
/// agree. Final ids are dense, assigned in base-cluster id order, so a single
/// scale passes through unchanged and the operation is idempotent.
Segmentation merge_scales(const std::vector<Segmentation>& coarse_to_fine,
                          const std::vector<MaterialLabel>& base_cluster_labels);

/// Multi-scale connected-component segmentation: components at every scale
/// (similarity = provisional labels agree), then the cross-scale merge above.
Segmentation mscc_segment(const PointCloud& cloud, const ScaleSet& scales,
                          const std::vector<BBox3D>& boxes,
                          Connectivity connectivity = Connectivity::TwentySix,
                          const Point3& origin = {});

/// Provisional material of every base cluster of a segmentation produced at
/// one scale (all cells of a cluster agree by construction).
std::vector<MaterialLabel> cluster_labels(const VoxelGrid& grid, const Segmentation& seg,
                                          const std::vector<MaterialLabel>& cell_labels);

}  // namespace matmap
