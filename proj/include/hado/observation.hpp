// Synthetic camera observation: handle mask, door point cloud, and the
// ground-truth fields a learned grasp model would have been trained on.
//
// The virtual camera is fixed: 640x480, focal length 525 px, principal point
// at the image center, world frame == camera frame (x right, y down,
// z forward).
#pragma once

#include <cstdint>
#include <vector>

#include "hado/door.hpp"
#include "hado/geometry.hpp"
#include "hado/kernels.hpp"

namespace hado {

struct Camera {
  static constexpr int kWidth = 640;
  static constexpr int kHeight = 480;
  static constexpr double kFocalPx = 525.0;
  static constexpr double kCx = 320.0;
  static constexpr double kCy = 240.0;

  // Ray through pixel px, parameterized as t * dir with dir.z == 1.
  static Vec3 ray_direction(const Vec2& px) {
    return {(px.x - kCx) / kFocalPx, (px.y - kCy) / kFocalPx, 1.0};
  }

  static Vec2 project(const Vec3& p) {
    return {kFocalPx * p.x / p.z + kCx, kFocalPx * p.y / p.z + kCy};
  }

  // Meters per pixel on a fronto-parallel patch at the given depth.
  static double pixel_pitch_m(double depth_m) { return depth_m / kFocalPx; }

  static bool in_bounds(const Vec2& px) {
    return px.x >= 0 && px.x < kWidth && px.y >= 0 && px.y < kHeight;
  }
};

struct PointCloud {
  std::vector<double> xs, ys, zs;

  std::size_t size() const { return xs.size(); }
  void push_back(const Vec3& p) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    zs.push_back(p.z);
  }
  Vec3 point(std::size_t i) const { return {xs[i], ys[i], zs[i]}; }
  kernels::CloudView view() const { return {xs.data(), ys.data(), zs.data(), size()}; }
};

struct Observation {
  int width = Camera::kWidth;
  int height = Camera::kHeight;
  std::vector<std::uint8_t> mask;  // row-major, 1 = handle pixel
  Vec2 centroid_px;                // exact integer-arithmetic mean of mask pixels
  std::size_t mask_area = 0;
  PointCloud cloud;
  HandleType handle_type = HandleType::Lever;

  // Privileged ground truth, consumed only by the geometric grasp refiner
  // (it stands in for a model trained on labeled handle images).
  Vec2 rotation_axis_px;
  std::vector<PxSegment> graspable_region;
  UnlockDirection true_unlock_direction = UnlockDirection::CW;

  bool at(int x, int y) const { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
};

}  // namespace hado
