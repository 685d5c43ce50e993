#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace matmap {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Point3& o) const { return x == o.x && y == o.y && z == o.z; }
};

double norm(const Point3& p);
double squared_norm(const Point3& p);
bool is_finite(const Point3& p);

using Rgb = std::array<std::uint8_t, 3>;

/// Rigid camera-to-world transform. The quaternion must be unit length within
/// 1e-6 at construction; it is renormalized exactly so transforms stay rigid.
class Pose {
 public:
  Pose();  // identity
  Pose(const Point3& translation, double qx, double qy, double qz, double qw);

  static Pose identity() { return Pose(); }

  const Point3& translation() const { return t_; }
  double qx() const { return qx_; }
  double qy() const { return qy_; }
  double qz() const { return qz_; }
  double qw() const { return qw_; }

 private:
  Point3 t_;
  double qx_, qy_, qz_, qw_;
};

/// Pinhole model, no distortion. Camera looks down +z, x right, y down.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);
};

/// Per-pixel depth in millimeters, 16-bit, 0 = invalid/missing.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> values;

  DepthImage() = default;
  DepthImage(int width, int height, std::vector<std::uint16_t> values);
  DepthImage(int width, int height, std::uint16_t fill = 0);

  std::uint16_t at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
  std::uint16_t& at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }
};

/// 8-bit RGB image, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = {0, 0, 0});

  const Rgb& at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u]; }
  Rgb& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }
};

struct PointCloud {
  std::vector<Point3> points;
  std::vector<Rgb> colors;  // empty, or one entry per point

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_colors() const { return !colors.empty(); }
  void append(const PointCloud& other);
};

/// Inverse pinhole projection into the camera frame.
/// Returns ((u-cx)*depth/fx, (v-cy)*depth/fy, depth). depth is in meters.
Point3 back_project_pixel(double u, double v, double depth, const CameraIntrinsics& intr);

/// Forward pinhole projection; p must have z > 0. Returns (u, v) in pixels.
std::array<double, 2> project_point(const Point3& p, const CameraIntrinsics& intr);

/// Rotates by the pose quaternion, then translates.
Point3 transform_point(const Pose& pose, const Point3& p);

/// Back-projects every sampled valid pixel (value != 0, depth inside
/// [min_depth, max_depth]) into the world frame. Sampling is row-major on a
/// stride x stride lattice starting at pixel (0, 0). If rgb is non-null and
/// matches the depth dimensions, per-point colors are sampled from it.
PointCloud depth_to_cloud(const DepthImage& depth, const CameraIntrinsics& intr, const Pose& pose,
                          int stride, double min_depth, double max_depth,
                          const RgbImage* rgb = nullptr);

}  // namespace matmap
