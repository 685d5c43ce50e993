#include "matmap/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

#include "matmap/error.hpp"
#include "matmap/rng.hpp"

namespace matmap {

namespace {

void check_positive_shape(int channels, int height, int width) {
  if (channels < 1 || height < 1 || width < 1)
    throw ShapeError("feature map dimensions must be positive");
}

std::string shape_str(const FeatureMap& f) {
  return std::to_string(f.channels) + "x" + std::to_string(f.height) + "x" +
         std::to_string(f.width);
}

}  // namespace

FeatureMap::FeatureMap(int channels_, int height_, int width_, double fill)
    : channels(channels_), height(height_), width(width_) {
  check_positive_shape(channels_, height_, width_);
  data.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

ConvFilter3x3::ConvFilter3x3(int in_channels_, double fill) : in_channels(in_channels_) {
  if (in_channels < 1) throw ShapeError("filter needs at least one input channel");
  weights.assign(static_cast<std::size_t>(in_channels) * 9, fill);
}

FusionWeights::FusionWeights(int in_channels)
    : w_rgb(in_channels), w_depth(in_channels), w_fuse(in_channels) {}

ClassifierHead::ClassifierHead(int in_features_) : in_features(in_features_) {
  if (in_features < 1) throw ShapeError("classifier head needs at least one input feature");
  weights.assign(static_cast<std::size_t>(kClassifiedMaterials) * in_features, 0.0);
  bias.assign(kClassifiedMaterials, 0.0);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

FeatureMap conv2d_3x3(const FeatureMap& input, const ConvFilter3x3& filter) {
  if (filter.in_channels != input.channels)
    throw ShapeError("filter expects " + std::to_string(filter.in_channels) +
                     " channels, input has " + std::to_string(input.channels));
  FeatureMap out(1, input.height, input.width, 0.0);
  for (int y = 0; y < input.height; ++y) {
    for (int x = 0; x < input.width; ++x) {
      double acc = filter.bias;
      for (int c = 0; c < input.channels; ++c) {
        for (int ky = 0; ky < 3; ++ky) {
          const int yy = y + ky - 1;
          if (yy < 0 || yy >= input.height) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int xx = x + kx - 1;
            if (xx < 0 || xx >= input.width) continue;
            acc += filter.at(c, ky, kx) * input.at(c, yy, xx);
          }
        }
      }
      out.at(0, y, x) = acc;
    }
  }
  return out;
}

FeatureMap modulate(const FeatureMap& input, const FeatureMap& features) {
  if (!input.same_shape(features))
    throw ShapeError("modulate requires identical shapes, got " + shape_str(input) + " and " +
                     shape_str(features));
  FeatureMap out = input;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= features.data[i];
  return out;
}

FuseLevelResult fuse_level(const FeatureMap& f_rgb, const FeatureMap& f_depth,
                           const FusionWeights& weights) {
  if (!f_rgb.same_shape(f_depth))
    throw ShapeError("fuse_level requires matching shapes, got " + shape_str(f_rgb) + " and " +
                     shape_str(f_depth));
  FuseLevelResult res;
  res.f_fuse = modulate(f_rgb, f_depth);

  FeatureMap u = conv2d_3x3(f_rgb, weights.w_rgb);
  FeatureMap v = conv2d_3x3(f_depth, weights.w_depth);
  FeatureMap w = conv2d_3x3(res.f_fuse, weights.w_fuse);

  const int h = f_rgb.height, wd = f_rgb.width;
  res.att.alpha_rgb = FeatureMap(1, h, wd);
  res.att.alpha_depth = FeatureMap(1, h, wd);
  res.att.alpha_fuse = FeatureMap(1, h, wd);
  res.att.alpha = FeatureMap(1, h, wd);
  for (std::size_t i = 0; i < u.data.size(); ++i) {
    const double a = sigmoid(u.data[i]);
    const double d = sigmoid(v.data[i]);
    const double m = sigmoid(w.data[i]);
    const double fuse = a * d * m;
    const double denom = a + d - fuse;
    res.att.alpha_rgb.data[i] = a;
    res.att.alpha_depth.data[i] = d;
    res.att.alpha_fuse.data[i] = fuse;
    res.att.alpha.data[i] = denom < kAlphaDenomGuard ? 0.0 : fuse / denom;
  }
  return res;
}

const FuseLevelResult& FuseLevelContext::forward(const FeatureMap& f_rgb,
                                                 const FeatureMap& f_depth,
                                                 const FusionWeights& weights) {
  f_rgb_ = f_rgb;
  f_depth_ = f_depth;
  weights_ = weights;
  result_ = fuse_level(f_rgb, f_depth, weights);
  sigma_fuse_ = conv2d_3x3(result_.f_fuse, weights.w_fuse);
  for (double& v : sigma_fuse_.data) v = sigmoid(v);
  ran_ = true;
  return result_;
}

const FuseLevelResult& FuseLevelContext::result() const {
  if (!ran_) throw StateError("forward() has not been run");
  return result_;
}

namespace {

// dL/d(filter), dL/d(bias) and dL/d(input) of out = filter conv input + bias
// given dL/d(out). Same padding/stride as conv2d_3x3.
void conv2d_3x3_backward(const FeatureMap& input, const ConvFilter3x3& filter,
                         const FeatureMap& grad_out, ConvFilter3x3* d_filter,
                         FeatureMap* d_input) {
  *d_filter = ConvFilter3x3(filter.in_channels, 0.0);
  for (int y = 0; y < input.height; ++y) {
    for (int x = 0; x < input.width; ++x) {
      const double g = grad_out.at(0, y, x);
      if (g == 0.0) continue;
      d_filter->bias += g;
      for (int c = 0; c < input.channels; ++c) {
        for (int ky = 0; ky < 3; ++ky) {
          const int yy = y + ky - 1;
          if (yy < 0 || yy >= input.height) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int xx = x + kx - 1;
            if (xx < 0 || xx >= input.width) continue;
            d_filter->at(c, ky, kx) += g * input.at(c, yy, xx);
            d_input->at(c, yy, xx) += g * filter.at(c, ky, kx);
          }
        }
      }
    }
  }
}

}  // namespace

FusionGradients FuseLevelContext::backward(const FeatureMap& grad_alpha,
                                           const FeatureMap* grad_f_fuse) const {
  if (!ran_) throw StateError("backward() called before forward()");
  const AttentionSet& att = result_.att;
  if (grad_alpha.channels != 1 || !grad_alpha.same_spatial(att.alpha))
    throw ShapeError("grad_alpha must be 1 x H x W matching the forward pass");
  if (grad_f_fuse && !grad_f_fuse->same_shape(result_.f_fuse))
    throw ShapeError("grad_f_fuse must match the f_fuse shape");

  const int h = f_rgb_.height, wd = f_rgb_.width;
  FeatureMap g_u(1, h, wd), g_v(1, h, wd), g_w(1, h, wd);
  for (std::size_t i = 0; i < grad_alpha.data.size(); ++i) {
    const double g = grad_alpha.data[i];
    const double a = att.alpha_rgb.data[i];
    const double d = att.alpha_depth.data[i];
    const double fuse = att.alpha_fuse.data[i];
    const double m = sigma_fuse_.data[i];
    const double denom = a + d - fuse;

    double g_a = 0.0, g_d = 0.0, g_m = 0.0;
    if (denom >= kAlphaDenomGuard && g != 0.0) {
      // alpha = fuse / (a + d - fuse) with fuse = a*d*m
      const double inv2 = 1.0 / (denom * denom);
      const double g_fuse_direct = g * (a + d) * inv2;
      const double g_sum = -g * fuse * inv2;
      g_a = g_sum + g_fuse_direct * d * m;
      g_d = g_sum + g_fuse_direct * a * m;
      g_m = g_fuse_direct * a * d;
    }
    g_u.data[i] = g_a * a * (1.0 - a);
    g_v.data[i] = g_d * d * (1.0 - d);
    g_w.data[i] = g_m * m * (1.0 - m);
  }

  FusionGradients grads;
  grads.d_f_rgb = FeatureMap(f_rgb_.channels, h, wd, 0.0);
  grads.d_f_depth = FeatureMap(f_rgb_.channels, h, wd, 0.0);
  FeatureMap d_f_fuse(f_rgb_.channels, h, wd, 0.0);

  conv2d_3x3_backward(f_rgb_, weights_.w_rgb, g_u, &grads.d_weights.w_rgb, &grads.d_f_rgb);
  conv2d_3x3_backward(f_depth_, weights_.w_depth, g_v, &grads.d_weights.w_depth,
                      &grads.d_f_depth);
  conv2d_3x3_backward(result_.f_fuse, weights_.w_fuse, g_w, &grads.d_weights.w_fuse, &d_f_fuse);

  if (grad_f_fuse) {
    for (std::size_t i = 0; i < d_f_fuse.data.size(); ++i)
      d_f_fuse.data[i] += grad_f_fuse->data[i];
  }
  // f_fuse = f_rgb * f_depth
  for (std::size_t i = 0; i < d_f_fuse.data.size(); ++i) {
    grads.d_f_rgb.data[i] += d_f_fuse.data[i] * f_depth_.data[i];
    grads.d_f_depth.data[i] += d_f_fuse.data[i] * f_rgb_.data[i];
  }
  return grads;
}

FeatureMap resize_nearest(const FeatureMap& input, int height, int width) {
  check_positive_shape(input.channels, height, width);
  FeatureMap out(input.channels, height, width);
  for (int c = 0; c < input.channels; ++c) {
    for (int y = 0; y < height; ++y) {
      const int sy = static_cast<int>(static_cast<std::int64_t>(y) * input.height / height);
      for (int x = 0; x < width; ++x) {
        const int sx = static_cast<int>(static_cast<std::int64_t>(x) * input.width / width);
        out.at(c, y, x) = input.at(c, sy, sx);
      }
    }
  }
  return out;
}

FeatureMap cascade(const std::vector<LevelInput>& levels,
                   const std::vector<FusionWeights>& weights) {
  if (levels.size() != kCascadeLevels)
    throw ConfigError("cascade requires exactly " + std::to_string(kCascadeLevels) +
                      " levels, got " + std::to_string(levels.size()));
  if (weights.size() != kCascadeLevels)
    throw ConfigError("cascade requires exactly " + std::to_string(kCascadeLevels) +
                      " weight sets, got " + std::to_string(weights.size()));
  const int h1 = levels.front().f_rgb.height;
  const int w1 = levels.front().f_rgb.width;
  FeatureMap prediction(1, h1, w1, 1.0);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const LevelInput& level = levels[i];
    if (level.f_rgb.height > h1 || level.f_rgb.width > w1)
      throw ShapeError("level " + std::to_string(i + 1) +
                       " is larger than level 1; coarser levels only");
    const FuseLevelResult res = fuse_level(level.f_rgb, level.f_depth, weights[i]);
    const FeatureMap up = resize_nearest(res.att.alpha, h1, w1);
    for (std::size_t j = 0; j < prediction.data.size(); ++j) prediction.data[j] *= up.data[j];
  }
  return prediction;
}

Classification classify(const FeatureMap& prediction_map, const FeatureMap& f_fuse,
                        const ClassifierHead& head) {
  if (prediction_map.channels != 1 || !prediction_map.same_spatial(f_fuse))
    throw ShapeError("prediction map must be 1 x H x W matching f_fuse");
  if (head.in_features != f_fuse.channels)
    throw ShapeError("head expects " + std::to_string(head.in_features) +
                     " features, f_fuse has " + std::to_string(f_fuse.channels));

  // Attention-weighted global average pool.
  std::vector<double> pooled(f_fuse.channels, 0.0);
  double total = 0.0;
  for (int y = 0; y < f_fuse.height; ++y)
    for (int x = 0; x < f_fuse.width; ++x) total += prediction_map.at(0, y, x);
  const double inv = 1.0 / std::max(total, 1e-12);
  for (int c = 0; c < f_fuse.channels; ++c) {
    double acc = 0.0;
    for (int y = 0; y < f_fuse.height; ++y)
      for (int x = 0; x < f_fuse.width; ++x)
        acc += prediction_map.at(0, y, x) * f_fuse.at(c, y, x);
    pooled[c] = acc * inv;
  }

  std::array<double, kClassifiedMaterials> logits{};
  for (int k = 0; k < kClassifiedMaterials; ++k) {
    double acc = head.bias[k];
    for (int c = 0; c < head.in_features; ++c)
      acc += head.weights[static_cast<std::size_t>(k) * head.in_features + c] * pooled[c];
    logits[k] = acc;
  }

  const double peak = *std::max_element(logits.begin(), logits.end());
  double norm = 0.0;
  Classification out;
  for (int k = 0; k < kClassifiedMaterials; ++k) {
    out.distribution.p[k] = std::exp(logits[k] - peak);
    norm += out.distribution.p[k];
  }
  int argmax = 0;
  for (int k = 0; k < kClassifiedMaterials; ++k) {
    out.distribution.p[k] /= norm;
    if (out.distribution.p[k] > out.distribution.p[argmax]) argmax = k;
  }
  out.label = out.distribution.p[argmax] < 0.5 ? MaterialLabel::Other
                                               : static_cast<MaterialLabel>(argmax);
  return out;
}

// --- serialization -----------------------------------------------------

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw ParseError(path, 0, "truncated tensor header");
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

}  // namespace

void write_tensor(std::ostream& out, const std::vector<std::uint32_t>& shape,
                  const std::vector<double>& data) {
  put_u32(out, static_cast<std::uint32_t>(shape.size()));
  std::size_t expected = 1;
  for (std::uint32_t dim : shape) {
    put_u32(out, dim);
    expected *= dim;
  }
  if (expected != data.size()) throw ShapeError("tensor shape does not match data length");
  for (double v : data) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }
}

std::vector<double> read_tensor(std::istream& in, std::vector<std::uint32_t>* shape,
                                const std::string& path) {
  const std::uint32_t rank = get_u32(in, path);
  if (rank > 8) throw ParseError(path, 0, "implausible tensor rank " + std::to_string(rank));
  shape->clear();
  std::size_t count = 1;
  for (std::uint32_t r = 0; r < rank; ++r) {
    shape->push_back(get_u32(in, path));
    count *= shape->back();
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = get_u32(in, path);
    float f;
    std::memcpy(&f, &bits, 4);
    data[i] = f;
  }
  return data;
}

void save_feature_map(const FeatureMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_tensor(out,
               {static_cast<std::uint32_t>(map.channels), static_cast<std::uint32_t>(map.height),
                static_cast<std::uint32_t>(map.width)},
               map.data);
}

FeatureMap load_feature_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::uint32_t> shape;
  std::vector<double> data = read_tensor(in, &shape, path);
  if (shape.size() != 3) throw ParseError(path, 0, "feature map tensors must have rank 3");
  FeatureMap map(static_cast<int>(shape[0]), static_cast<int>(shape[1]),
                 static_cast<int>(shape[2]));
  map.data = std::move(data);
  return map;
}

namespace {

void write_filter(std::ostream& out, const ConvFilter3x3& f) {
  write_tensor(out, {static_cast<std::uint32_t>(f.in_channels), 3, 3}, f.weights);
  write_tensor(out, {1}, {f.bias});
}

ConvFilter3x3 read_filter(std::istream& in, const std::string& path) {
  std::vector<std::uint32_t> shape;
  std::vector<double> w = read_tensor(in, &shape, path);
  if (shape.size() != 3 || shape[1] != 3 || shape[2] != 3)
    throw ParseError(path, 0, "filter tensors must have shape [C, 3, 3]");
  ConvFilter3x3 f(static_cast<int>(shape[0]));
  f.weights = std::move(w);
  std::vector<double> b = read_tensor(in, &shape, path);
  if (shape.size() != 1 || shape[0] != 1)
    throw ParseError(path, 0, "filter bias tensors must have shape [1]");
  f.bias = b[0];
  return f;
}

}  // namespace

void save_cascade_weights(const CascadeWeights& weights, const std::string& path) {
  if (weights.levels.size() != kCascadeLevels)
    throw ConfigError("cascade weights must hold exactly " + std::to_string(kCascadeLevels) +
                      " levels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const FusionWeights& level : weights.levels) {
    write_filter(out, level.w_rgb);
    write_filter(out, level.w_depth);
    write_filter(out, level.w_fuse);
  }
  write_tensor(out,
               {kClassifiedMaterials, static_cast<std::uint32_t>(weights.head.in_features)},
               weights.head.weights);
  write_tensor(out, {kClassifiedMaterials}, weights.head.bias);
}

CascadeWeights load_cascade_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  CascadeWeights weights;
  for (int i = 0; i < kCascadeLevels; ++i) {
    FusionWeights level;
    level.w_rgb = read_filter(in, path);
    level.w_depth = read_filter(in, path);
    level.w_fuse = read_filter(in, path);
    weights.levels.push_back(std::move(level));
  }
  std::vector<std::uint32_t> shape;
  std::vector<double> w = read_tensor(in, &shape, path);
  if (shape.size() != 2 || shape[0] != kClassifiedMaterials)
    throw ParseError(path, 0, "head weights must have shape [10, C]");
  weights.head = ClassifierHead(static_cast<int>(shape[1]));
  weights.head.weights = std::move(w);
  std::vector<double> b = read_tensor(in, &shape, path);
  if (shape.size() != 1 || shape[0] != kClassifiedMaterials)
    throw ParseError(path, 0, "head bias must have shape [10]");
  weights.head.bias = std::move(b);
  return weights;
}

namespace {

ConvFilter3x3 random_filter(int in_channels, DetRng& rng, double scale) {
  ConvFilter3x3 f(in_channels);
  for (double& w : f.weights) w = rng.uniform(-scale, scale);
  f.bias = rng.uniform(-scale, scale);
  return f;
}

}  // namespace

FusionWeights random_fusion_weights(int in_channels, std::uint64_t seed, double scale) {
  DetRng rng(seed);
  FusionWeights w;
  w.w_rgb = random_filter(in_channels, rng, scale);
  w.w_depth = random_filter(in_channels, rng, scale);
  w.w_fuse = random_filter(in_channels, rng, scale);
  return w;
}

CascadeWeights random_cascade_weights(int in_channels, std::uint64_t seed, double scale) {
  CascadeWeights weights;
  for (int i = 0; i < kCascadeLevels; ++i)
    weights.levels.push_back(random_fusion_weights(in_channels, mix_seed(seed, i + 1), scale));
  DetRng rng(mix_seed(seed, 97));
  weights.head = ClassifierHead(in_channels);
  for (double& w : weights.head.weights) w = rng.uniform(-scale, scale);
  for (double& b : weights.head.bias) b = rng.uniform(-scale, scale);
  return weights;
}

FeatureMap random_feature_map(int channels, int height, int width, std::uint64_t seed, double lo,
                              double hi) {
  DetRng rng(seed);
  FeatureMap map(channels, height, width);
  for (double& v : map.data) v = rng.uniform(lo, hi);
  return map;
}

}  // namespace matmap
