#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "matmap/materials.hpp"

namespace matmap {

/// Dense C x H x W tensor, row-major (c, y, x).
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int channels, int height, int width, double fill = 0.0);

  double& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  std::size_t size() const { return data.size(); }
  bool same_shape(const FeatureMap& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
  bool same_spatial(const FeatureMap& o) const { return height == o.height && width == o.width; }
};

/// One 3x3 convolution bank mapping in_channels -> 1 channel, plus a bias.
struct ConvFilter3x3 {
  int in_channels = 0;
  std::vector<double> weights;  // [c][ky][kx], in_channels * 9 entries
  double bias = 0.0;

  ConvFilter3x3() = default;
  explicit ConvFilter3x3(int in_channels, double fill = 0.0);

  double& at(int c, int ky, int kx) { return weights[(c * 3 + ky) * 3 + kx]; }
  double at(int c, int ky, int kx) const { return weights[(c * 3 + ky) * 3 + kx]; }
};

/// The three learnable filters of one fusion level.
struct FusionWeights {
  ConvFilter3x3 w_rgb;
  ConvFilter3x3 w_depth;
  ConvFilter3x3 w_fuse;

  FusionWeights() = default;
  explicit FusionWeights(int in_channels);
};

/// Attention maps of one fusion level, each 1 x H x W with values in [0, 1];
/// alpha is the normalized map alpha_fuse / (alpha_rgb + alpha_depth - alpha_fuse).
struct AttentionSet {
  FeatureMap alpha_rgb;
  FeatureMap alpha_depth;
  FeatureMap alpha_fuse;
  FeatureMap alpha;
};

/// Probabilities over the 10 classified materials (Other is decided by the
/// max-probability rule, not predicted directly). Sums to 1 within 1e-6.
struct MaterialDistribution {
  std::array<double, kClassifiedMaterials> p{};
};

/// 3x3 convolution, stride 1, zero padding 1 (same spatial size), fixed
/// accumulation order. Output is 1 x H x W. Throws ShapeError on channel
/// mismatch.
FeatureMap conv2d_3x3(const FeatureMap& input, const ConvFilter3x3& filter);

/// Elementwise product; shapes must match exactly.
FeatureMap modulate(const FeatureMap& input, const FeatureMap& features);

double sigmoid(double x);

struct FuseLevelResult {
  FeatureMap f_fuse;
  AttentionSet att;
};

// When alpha_rgb + alpha_depth - alpha_fuse falls below this, the pixel has
// no attention mass and alpha is defined as 0.
inline constexpr double kAlphaDenomGuard = 1e-12;

/// One fusion level: f_fuse = f_rgb * f_depth (elementwise),
/// alpha_rgb = sigmoid(W_rgb conv f_rgb), alpha_depth = sigmoid(W_depth conv f_depth),
/// alpha_fuse = alpha_rgb * alpha_depth * sigmoid(W_fuse conv f_fuse),
/// alpha = alpha_fuse / (alpha_rgb + alpha_depth - alpha_fuse) with the guard above.
FuseLevelResult fuse_level(const FeatureMap& f_rgb, const FeatureMap& f_depth,
                           const FusionWeights& weights);

struct FusionGradients {
  FeatureMap d_f_rgb;
  FeatureMap d_f_depth;
  FusionWeights d_weights;  // same layout as the weights themselves
};

/// Forward pass that retains intermediates so the exact gradients of any
/// scalar loss on (alpha, f_fuse) can be pulled back through the level.
class FuseLevelContext {
 public:
  const FuseLevelResult& forward(const FeatureMap& f_rgb, const FeatureMap& f_depth,
                                 const FusionWeights& weights);

  /// grad_alpha is dL/d(alpha) (1 x H x W); grad_f_fuse, when non-null, is
  /// dL/d(f_fuse) (C x H x W). Throws StateError before forward() ran.
  FusionGradients backward(const FeatureMap& grad_alpha,
                           const FeatureMap* grad_f_fuse = nullptr) const;

  const FuseLevelResult& result() const;

 private:
  bool ran_ = false;
  FeatureMap f_rgb_, f_depth_;
  FeatureMap sigma_fuse_;  // sigmoid(W_fuse conv f_fuse), kept for backward
  FusionWeights weights_;
  FuseLevelResult result_;
};

inline constexpr int kCascadeLevels = 5;

struct LevelInput {
  FeatureMap f_rgb;
  FeatureMap f_depth;
};

/// Nearest-neighbor resize of a 1-or-more channel map to (height, width).
FeatureMap resize_nearest(const FeatureMap& input, int height, int width);

/// Five cascaded fusion levels. Each level's normalized alpha is upsampled to
/// the level-1 spatial size (nearest neighbor) and the maps are combined by
/// elementwise multiplication into a single 1 x H1 x W1 prediction map.
FeatureMap cascade(const std::vector<LevelInput>& levels,
                   const std::vector<FusionWeights>& weights);

/// Linear head mapping a pooled C-vector to the 10 material logits.
struct ClassifierHead {
  int in_features = 0;
  std::vector<double> weights;  // [class][feature]
  std::vector<double> bias;     // [class]

  ClassifierHead() = default;
  explicit ClassifierHead(int in_features);
};

struct Classification {
  MaterialLabel label = MaterialLabel::Other;
  MaterialDistribution distribution;
};

/// Attention-weighted global average pool of f_fuse, linear head, softmax.
/// The argmax class is returned unless its probability is below 0.5, in
/// which case the label is Other.
Classification classify(const FeatureMap& prediction_map, const FeatureMap& f_fuse,
                        const ClassifierHead& head);

// --- serialization -----------------------------------------------------
// Flat binary tensors: little-endian u32 rank, u32 dims, then float32 data.

void write_tensor(std::ostream& out, const std::vector<std::uint32_t>& shape,
                  const std::vector<double>& data);
std::vector<double> read_tensor(std::istream& in, std::vector<std::uint32_t>* shape,
                                const std::string& path);

void save_feature_map(const FeatureMap& map, const std::string& path);
FeatureMap load_feature_map(const std::string& path);

/// Full toy-model parameters: five fusion levels plus the classifier head.
struct CascadeWeights {
  std::vector<FusionWeights> levels;  // kCascadeLevels entries
  ClassifierHead head;
};

void save_cascade_weights(const CascadeWeights& weights, const std::string& path);
CascadeWeights load_cascade_weights(const std::string& path);

/// Seeded uniform init in [-scale, scale]; reproducible across platforms.
FusionWeights random_fusion_weights(int in_channels, std::uint64_t seed, double scale = 0.5);
CascadeWeights random_cascade_weights(int in_channels, std::uint64_t seed, double scale = 0.5);
FeatureMap random_feature_map(int channels, int height, int width, std::uint64_t seed,
                              double lo = -1.0, double hi = 1.0);

}  // namespace matmap
