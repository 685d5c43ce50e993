#include "matmap/mscc.hpp"

#include <unordered_map>

#include "matmap/error.hpp"

namespace matmap {

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
  }
  std::int32_t find(std::int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller id wins so representatives are stable across runs.
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::int32_t> parent;
};

}  // namespace

ScaleSet::ScaleSet(std::vector<double> scales) : scales_(std::move(scales)) {
  if (scales_.empty()) throw InvalidInputError("scale set must contain at least one scale");
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (!(scales_[i] > 0.0)) throw InvalidInputError("voxel scales must be positive");
    if (i > 0 && !(scales_[i] < scales_[i - 1]))
      throw InvalidInputError("voxel scales must be strictly decreasing");
  }
}

std::vector<MaterialLabel> provisional_cell_labels(const VoxelGrid& grid,
                                                   const std::vector<BBox3D>& boxes) {
  std::vector<MaterialLabel> labels(grid.cell_count(), MaterialLabel::Other);
  if (boxes.empty()) return labels;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    labels[c] = boxes[nearest_box(grid.cell_center(c), boxes)].material;
  }
  return labels;
}

std::vector<MaterialLabel> cluster_labels(const VoxelGrid& grid, const Segmentation& seg,
                                          const std::vector<MaterialLabel>& cell_labels) {
  std::vector<MaterialLabel> labels(seg.num_clusters, MaterialLabel::Other);
  std::vector<bool> seen(seg.num_clusters, false);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto pts = grid.cell_points(c);
    if (pts.empty()) continue;
    const std::int32_t cluster = seg.cluster_of_point[pts.front()];
    if (cluster < 0 || seen[cluster]) continue;
    labels[cluster] = cell_labels[c];
    seen[cluster] = true;
  }
  return labels;
}

Segmentation merge_scales(const std::vector<Segmentation>& coarse_to_fine,
                          const std::vector<MaterialLabel>& base_cluster_labels) {
  if (coarse_to_fine.empty()) throw InvalidInputError("merge_scales requires >= 1 segmentation");
  const Segmentation& base = coarse_to_fine.back();
  const std::size_t n_points = base.size();
  for (const Segmentation& seg : coarse_to_fine) {
    if (seg.size() != n_points)
      throw InvalidInputError("all segmentations must cover the same point set");
  }
  if (base_cluster_labels.size() != static_cast<std::size_t>(base.num_clusters))
    throw InvalidInputError("one provisional label per base cluster required");

  UnionFind uf(base.num_clusters);
  // Within each coarser component, base clusters with equal provisional
  // labels collapse together.
  for (std::size_t s = 0; s + 1 < coarse_to_fine.size(); ++s) {
    const Segmentation& coarse = coarse_to_fine[s];
    std::unordered_map<std::int64_t, std::int32_t> first_in_group;
    first_in_group.reserve(n_points / 4 + 1);
    for (std::size_t p = 0; p < n_points; ++p) {
      const std::int32_t comp = coarse.cluster_of_point[p];
      const std::int32_t cluster = base.cluster_of_point[p];
      if (comp < 0 || cluster < 0) continue;
      const std::int64_t key =
          static_cast<std::int64_t>(comp) * kMaterialCount +
          static_cast<std::int64_t>(material_id(base_cluster_labels[cluster]));
      auto [it, inserted] = first_in_group.emplace(key, cluster);
      if (!inserted) uf.unite(it->second, cluster);
    }
  }

  // Dense relabel in base-cluster id order; a single scale passes through
  // unchanged.
  std::vector<std::int32_t> dense(base.num_clusters, -1);
  std::int32_t next = 0;
  for (std::int32_t b = 0; b < base.num_clusters; ++b) {
    const std::int32_t root = uf.find(b);
    if (dense[root] == -1) dense[root] = next++;
    dense[b] = dense[root];
  }

  Segmentation out;
  out.num_clusters = next;
  out.cluster_of_point.resize(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    const std::int32_t b = base.cluster_of_point[p];
    out.cluster_of_point[p] = b < 0 ? -1 : dense[b];
  }
  return out;
}

Segmentation mscc_segment(const PointCloud& cloud, const ScaleSet& scales,
                          const std::vector<BBox3D>& boxes, Connectivity connectivity,
                          const Point3& origin) {
  std::vector<Segmentation> segs;
  segs.reserve(scales.size());
  std::vector<MaterialLabel> base_labels;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const VoxelGrid grid = voxelize(cloud, scales.scales()[s], origin);
    const std::vector<MaterialLabel> cell_mat = provisional_cell_labels(grid, boxes);
    const CellSimilarity same_label = [&cell_mat](std::size_t a, std::size_t b) {
      return cell_mat[a] == cell_mat[b];
    };
    segs.push_back(connected_components(grid, connectivity, same_label));
    if (s + 1 == scales.size()) base_labels = cluster_labels(grid, segs.back(), cell_mat);
  }
  return merge_scales(segs, base_labels);
}

}  // namespace matmap
