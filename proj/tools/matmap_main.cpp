// Command-line front end: `run` executes the full mapping pipeline over a
// recorded sequence; `segment` and `evaluate` expose the clustering and
// metric stages standalone; `demo-fusion` exercises the attention fusion
// arithmetic with a gradient check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matmap/error.hpp"
#include "matmap/fusion.hpp"
#include "matmap/metrics.hpp"
#include "matmap/pipeline.hpp"
#include "matmap/ply.hpp"
#include "matmap/profiling.hpp"
#include "matmap/rng.hpp"
#include "matmap/toy_model.hpp"

namespace fs = std::filesystem;
using namespace matmap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitRuntime = 4;

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) return;
  if (!fs::exists(path)) throw ConfigError(what + " '" + path + "' does not exist");
}

struct ConfigFlags {
  std::string config_path;
  std::vector<double> scales;
  int connectivity = 0;
  int stride = 0;
  double min_depth = 0.0;
  double max_depth = 0.0;
  double cutoff = -1.0;
  int keyframe_interval = 0;
  std::string classifier;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override its keys)");
    cmd->add_option("--scales", scales, "voxel scales, meters, strictly decreasing");
    cmd->add_option("--connectivity", connectivity, "voxel connectivity: 6, 18 or 26");
    cmd->add_option("--stride", stride, "depth sampling stride, pixels");
    cmd->add_option("--min-depth", min_depth, "minimum depth, meters");
    cmd->add_option("--max-depth", max_depth, "maximum depth, meters");
    cmd->add_option("--cutoff", cutoff, "label propagation cutoff, meters");
    cmd->add_option("--keyframe-interval", keyframe_interval, "process every k-th frame");
    cmd->add_option("--classifier", classifier, "material source: passthrough | toy-cafn");
    cmd->add_option("--seed", seed, "seed for the toy classifier");
  }

  PipelineConfig resolve(const CLI::App* cmd) const {
    PipelineConfig config;
    if (!config_path.empty()) {
      require_file(config_path, "config");
      config = load_config(config_path);
    }
    if (cmd->count("--scales")) config.scales = scales;
    if (cmd->count("--connectivity")) config.connectivity = connectivity;
    if (cmd->count("--stride")) config.stride = stride;
    if (cmd->count("--min-depth")) config.min_depth = min_depth;
    if (cmd->count("--max-depth")) config.max_depth = max_depth;
    if (cmd->count("--cutoff")) config.label_cutoff = cutoff;
    if (cmd->count("--keyframe-interval")) config.keyframe_interval = keyframe_interval;
    if (cmd->count("--classifier")) config.classifier = classifier;
    if (cmd->count("--seed")) config.seed = seed;
    config.validate();
    return config;
  }
};

int cmd_run(const std::string& manifest, const std::string& out_dir, const std::string& gt,
            const std::string& weights, const PipelineConfig& config, bool incremental) {
  require_file(manifest, "manifest");
  require_file(gt, "ground truth");
  require_file(weights, "weights");

  RunOptions options;
  options.manifest_path = manifest;
  options.groundtruth_path = gt;
  options.weights_path = weights;
  options.config = config;
  options.incremental = incremental;

  const RunResult result = run_pipeline(options);
  write_run_outputs(result, out_dir);

  std::printf("points=%zu clusters=%d boxes=%zu\n", result.map.size(),
              result.metrics.n_clusters, result.boxes.size());
  if (result.metrics.mean_iou) std::printf("mean_iou=%.6f\n", *result.metrics.mean_iou);
  if (result.metrics.map) std::printf("map=%.6f\n", *result.metrics.map);
  std::printf("outputs: %s/map.ply %s/metrics.json %s/boxes.json %s/timings.json\n",
              out_dir.c_str(), out_dir.c_str(), out_dir.c_str(), out_dir.c_str());
  return kExitOk;
}

int cmd_segment(const std::string& cloud_path, const std::string& boxes_path,
                const std::string& out_path, const PipelineConfig& config) {
  require_file(cloud_path, "cloud");
  require_file(boxes_path, "boxes");

  const PlyContents contents = read_ply(cloud_path);
  const std::vector<BBox3D> boxes = load_boxes_json(boxes_path);
  SemanticMap map = segment_cloud(contents.cloud, boxes, config);
  write_ply(map, out_path);
  std::int32_t clusters = 0;
  for (std::int32_t c : map.cluster_ids) clusters = std::max(clusters, c + 1);
  std::printf("points=%zu clusters=%d -> %s\n", map.size(), clusters, out_path.c_str());
  return kExitOk;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path,
                 const std::string& boxes_path, const std::string& out_path,
                 double iou_threshold) {
  require_file(pred_path, "prediction");
  require_file(gt_path, "ground truth");
  require_file(boxes_path, "boxes");

  StageProfiler profile;
  const SemanticMap pred = profile.time("load", [&] {
    return semantic_map_from_ply(read_ply(pred_path));
  });
  const GroundTruthMap gt = profile.time("load", [&] { return load_groundtruth(gt_path); });
  std::vector<BBox3D> boxes;
  if (!boxes_path.empty()) {
    boxes = load_boxes_json(boxes_path);
  } else {
    // No detector boxes provided: match per-cluster AABBs at confidence 1.
    boxes = cluster_boxes(pred);
  }
  MetricsReport report = profile.time("evaluate", [&] {
    return evaluate_map(pred, boxes, gt, iou_threshold);
  });
  report.timings_ms = profile.stages();

  const std::string text = report.to_json_string();
  std::fputs(text.c_str(), stdout);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open '" + out_path + "' for writing");
    out << text;
  }
  return kExitOk;
}

int cmd_demo_fusion(std::uint64_t seed, int channels, int height, int width, bool zero_weights,
                    int train_steps) {
  if (height > 8 || width > 8) throw ConfigError("demo shapes are limited to 8x8 spatial");
  if (channels < 1 || height < 1 || width < 1) throw ConfigError("shape must be positive");

  const FeatureMap f_rgb = random_feature_map(channels, height, width, mix_seed(seed, 1));
  const FeatureMap f_depth = random_feature_map(channels, height, width, mix_seed(seed, 2));
  const FusionWeights weights = zero_weights ? FusionWeights(channels)
                                             : random_fusion_weights(channels, mix_seed(seed, 3));

  FuseLevelContext ctx;
  const FuseLevelResult& res = ctx.forward(f_rgb, f_depth, weights);

  double mn = 1.0, mx = 0.0, mean = 0.0;
  bool invariants_ok = true;
  for (std::size_t i = 0; i < res.att.alpha.data.size(); ++i) {
    const double a = res.att.alpha_rgb.data[i];
    const double d = res.att.alpha_depth.data[i];
    const double fuse = res.att.alpha_fuse.data[i];
    const double alpha = res.att.alpha.data[i];
    mn = std::min(mn, alpha);
    mx = std::max(mx, alpha);
    mean += alpha;
    const double eps = 1e-12;
    if (!(alpha >= 0.0 && alpha <= std::min(a, d) + eps && std::min(a, d) <= 1.0)) {
      invariants_ok = false;
    }
    if (!(fuse >= 0.0 && fuse <= a * d + eps)) invariants_ok = false;
  }
  mean /= static_cast<double>(res.att.alpha.data.size());
  std::printf("alpha min=%.12g max=%.12g mean=%.12g\n", mn, mx, mean);
  std::printf("invariants: %s\n", invariants_ok ? "ok" : "VIOLATED");

  // Central finite differences of L = mean(alpha) over every weight entry.
  FeatureMap grad_alpha(1, height, width, 1.0 / (height * width));
  const FusionGradients grads = ctx.backward(grad_alpha);

  auto loss_for = [&](const FusionWeights& w) {
    const FuseLevelResult r = fuse_level(f_rgb, f_depth, w);
    double sum = 0.0;
    for (double v : r.att.alpha.data) sum += v;
    return sum / static_cast<double>(r.att.alpha.data.size());
  };

  const double h = 1e-5;
  double max_rel = 0.0;
  FusionWeights mutable_weights = weights;
  auto sweep_filter = [&](ConvFilter3x3& f, const ConvFilter3x3& g) {
    for (std::size_t i = 0; i < f.weights.size(); ++i) {
      const double saved = f.weights[i];
      f.weights[i] = saved + h;
      const double up = loss_for(mutable_weights);
      f.weights[i] = saved - h;
      const double down = loss_for(mutable_weights);
      f.weights[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel =
          std::abs(g.weights[i] - fd) / std::max({std::abs(g.weights[i]), std::abs(fd), 1e-5});
      max_rel = std::max(max_rel, rel);
    }
    const double saved = f.bias;
    f.bias = saved + h;
    const double up = loss_for(mutable_weights);
    f.bias = saved - h;
    const double down = loss_for(mutable_weights);
    f.bias = saved;
    const double fd = (up - down) / (2.0 * h);
    const double rel = std::abs(g.bias - fd) / std::max({std::abs(g.bias), std::abs(fd), 1e-5});
    max_rel = std::max(max_rel, rel);
  };
  sweep_filter(mutable_weights.w_rgb, grads.d_weights.w_rgb);
  sweep_filter(mutable_weights.w_depth, grads.d_weights.w_depth);
  sweep_filter(mutable_weights.w_fuse, grads.d_weights.w_fuse);

  std::printf("gradient check: max relative error = %.6g (%s)\n", max_rel,
              max_rel < 1e-4 ? "ok" : "FAILED");

  if (train_steps > 0) {
    const ToyTrainReport report = toy_train_demo(seed, train_steps);
    std::printf("toy training: loss %.6g -> %.6g over %d steps\n", report.initial_loss,
                report.final_loss, report.steps);
  }
  return invariants_ok && max_rel < 1e-4 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-oriented material mapping over recorded RGB-D sequences"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "full pipeline: ingest, segment, label, export");
  std::string manifest, out_dir = "out", gt_path, weights_path;
  bool incremental = false;
  run->add_option("--manifest", manifest, "sequence manifest JSON")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--gt", gt_path, "ground truth JSON (adds IoU/mAP to metrics)");
  run->add_option("--weights", weights_path, "toy-cafn weights file");
  run->add_flag("--incremental", incremental, "re-segment after every keyframe");
  ConfigFlags run_flags;
  run_flags.add_to(run);

  // segment
  auto* segment = app.add_subcommand("segment", "cluster and label an existing cloud");
  std::string cloud_path, boxes_path, seg_out = "segmented.ply";
  segment->add_option("--cloud", cloud_path, "input PLY")->required();
  segment->add_option("--boxes", boxes_path, "3D boxes JSON")->required();
  segment->add_option("--out", seg_out, "output PLY");
  ConfigFlags seg_flags;
  seg_flags.add_to(segment);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "metrics for a predicted map");
  std::string pred_path, eval_gt, eval_boxes, eval_out;
  double iou_threshold = kDefaultIouThreshold;
  evaluate->add_option("--pred", pred_path, "predicted map PLY")->required();
  evaluate->add_option("--gt", eval_gt, "ground truth JSON")->required();
  evaluate->add_option("--boxes", eval_boxes, "predicted boxes JSON (else per-cluster AABBs)");
  evaluate->add_option("--out", eval_out, "metrics JSON output path");
  evaluate->add_option("--iou-threshold", iou_threshold, "detection match threshold");

  // demo-fusion
  auto* demo = app.add_subcommand("demo-fusion", "attention fusion statistics + gradient check");
  std::uint64_t demo_seed = 1;
  int demo_channels = 2, demo_height = 4, demo_width = 4, train_steps = 0;
  bool zero_weights = false;
  demo->add_option("--seed", demo_seed, "rng seed");
  demo->add_option("--channels", demo_channels, "feature channels");
  demo->add_option("--height", demo_height, "spatial height (<= 8)");
  demo->add_option("--width", demo_width, "spatial width (<= 8)");
  demo->add_flag("--zero-weights", zero_weights, "use all-zero weights (closed form)");
  demo->add_option("--train", train_steps, "also run the toy training demo for N steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      return cmd_run(manifest, out_dir, gt_path, weights_path, run_flags.resolve(run),
                     incremental);
    }
    if (segment->parsed()) {
      return cmd_segment(cloud_path, boxes_path, seg_out, seg_flags.resolve(segment));
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(pred_path, eval_gt, eval_boxes, eval_out, iou_threshold);
    }
    if (demo->parsed()) {
      return cmd_demo_fusion(demo_seed, demo_channels, demo_height, demo_width, zero_weights,
                             train_steps);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
