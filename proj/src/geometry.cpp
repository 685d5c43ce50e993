#include "matmap/geometry.hpp"

#include <cmath>
#include <iostream>
#include <mutex>

#include "matmap/error.hpp"

namespace matmap {

namespace {
bool g_warnings_enabled = true;
std::mutex g_warn_mutex;
}  // namespace

void log_warning(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  if (g_warnings_enabled) std::cerr << "[matmap] warning: " << message << "\n";
}

void set_warnings_enabled(bool enabled) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  g_warnings_enabled = enabled;
}

double squared_norm(const Point3& p) { return p.x * p.x + p.y * p.y + p.z * p.z; }

double norm(const Point3& p) { return std::sqrt(squared_norm(p)); }

bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

Pose::Pose() : t_{0, 0, 0}, qx_(0), qy_(0), qz_(0), qw_(1) {}

Pose::Pose(const Point3& translation, double qx, double qy, double qz, double qw) : t_(translation) {
  if (!is_finite(translation)) throw InvalidInputError("pose translation must be finite");
  const double n = std::sqrt(qx * qx + qy * qy + qz * qz + qw * qw);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-6)
    throw InvalidInputError("pose quaternion must be unit length within 1e-6, got norm " +
                            std::to_string(n));
  qx_ = qx / n;
  qy_ = qy / n;
  qz_ = qz / n;
  qw_ = qw / n;
}

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int width_,
                                   int height_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidInputError("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidInputError("image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
    throw InvalidInputError("principal point must lie inside the image");
}

DepthImage::DepthImage(int width_, int height_, std::vector<std::uint16_t> values_)
    : width(width_), height(height_), values(std::move(values_)) {
  if (width < 0 || height < 0) throw InvalidInputError("depth image size must be non-negative");
  if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InvalidInputError("depth image value count must equal width * height");
}

DepthImage::DepthImage(int width_, int height_, std::uint16_t fill)
    : width(width_), height(height_) {
  if (width < 0 || height < 0) throw InvalidInputError("depth image size must be non-negative");
  values.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RgbImage::RgbImage(int width_, int height_, Rgb fill) : width(width_), height(height_) {
  if (width < 0 || height < 0) throw InvalidInputError("rgb image size must be non-negative");
  pixels.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

void PointCloud::append(const PointCloud& other) {
  const bool self_colored = has_colors() || empty();
  points.insert(points.end(), other.points.begin(), other.points.end());
  if (self_colored && other.has_colors()) {
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
  } else {
    colors.clear();  // mixed colored/uncolored appends drop colors
  }
}

Point3 back_project_pixel(double u, double v, double depth, const CameraIntrinsics& intr) {
  if (!(depth > 0.0)) throw InvalidInputError("back-projection requires positive depth");
  if (!(u >= 0.0 && u < intr.width && v >= 0.0 && v < intr.height))
    throw InvalidInputError("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") outside image bounds");
  return {(u - intr.cx) * depth / intr.fx, (v - intr.cy) * depth / intr.fy, depth};
}

std::array<double, 2> project_point(const Point3& p, const CameraIntrinsics& intr) {
  if (!(p.z > 0.0)) throw InvalidInputError("projection requires z > 0");
  return {intr.fx * p.x / p.z + intr.cx, intr.fy * p.y / p.z + intr.cy};
}

Point3 transform_point(const Pose& pose, const Point3& p) {
  // v' = v + 2 w (q x v) + 2 q x (q x v), q = (qx, qy, qz), w = qw
  const double qx = pose.qx(), qy = pose.qy(), qz = pose.qz(), qw = pose.qw();
  const double cx = qy * p.z - qz * p.y;
  const double cy = qz * p.x - qx * p.z;
  const double cz = qx * p.y - qy * p.x;
  const double ccx = qy * cz - qz * cy;
  const double ccy = qz * cx - qx * cz;
  const double ccz = qx * cy - qy * cx;
  const Point3& t = pose.translation();
  return {p.x + 2.0 * (qw * cx + ccx) + t.x, p.y + 2.0 * (qw * cy + ccy) + t.y,
          p.z + 2.0 * (qw * cz + ccz) + t.z};
}

PointCloud depth_to_cloud(const DepthImage& depth, const CameraIntrinsics& intr, const Pose& pose,
                          int stride, double min_depth, double max_depth, const RgbImage* rgb) {
  if (stride < 1) throw InvalidInputError("stride must be >= 1");
  if (!(min_depth > 0.0) || !(min_depth < max_depth))
    throw InvalidInputError("depth range must satisfy 0 < min_depth < max_depth");
  if (depth.width != intr.width || depth.height != intr.height)
    throw InvalidInputError("depth image size does not match intrinsics");
  const bool sample_color = rgb != nullptr && rgb->width == depth.width && rgb->height == depth.height;

  PointCloud cloud;
  for (int v = 0; v < depth.height; v += stride) {
    for (int u = 0; u < depth.width; u += stride) {
      const std::uint16_t raw = depth.at(u, v);
      if (raw == 0) continue;
      const double z = raw * 1e-3;  // millimeters to meters
      if (z < min_depth || z > max_depth) continue;
      const Point3 cam = back_project_pixel(u, v, z, intr);
      cloud.points.push_back(transform_point(pose, cam));
      if (sample_color) cloud.colors.push_back(rgb->at(u, v));
    }
  }
  return cloud;
}

}  // namespace matmap
