// Door-plane estimation, grasp refinement, and grasp pose construction.
//
// Grasp refinement hides behind the GraspRefiner interface so a learned model
// can replace either implementation without touching callers:
//   - CentroidBaseline: zero offset, fixed rotation prior (the no-refinement
//     comparison arm).
//   - GeometricOracle: grasp point from the graspable-skeleton geometry, with
//     an imperfect unlock-direction prior drawn per episode.
#pragma once

#include <cstdint>

#include "hado/config.hpp"
#include "hado/direction.hpp"
#include "hado/geometry.hpp"
#include "hado/observation.hpp"

namespace hado {

struct PlaneFit {
  Vec3 normal;         // unit, oriented toward the robot (normal.z < 0)
  double offset_m = 0; // plane = {p : normal . p = offset}
  int inlier_count = 0;
  double inlier_threshold_m = 0;
};

// Classic random-sample-consensus plane fit: best triple by inlier count,
// then a least-squares refit (centroid + smallest covariance eigenvector) on
// the consensus set. Deterministic per seed.
// Throws TooFewPointsError (< 3 points) or DegenerateCloudError.
PlaneFit ransac_plane(const PointCloud& cloud, double inlier_threshold_m,
                      int iterations, std::uint64_t seed);

// Least-squares fit over all points; the independent reference used by tests.
PlaneFit fit_plane_least_squares(const PointCloud& cloud);

struct GraspPrediction {
  double dx_px = 0.0;  // offset from mask centroid to the grasp point
  double dy_px = 0.0;
  double rotation_param_R = 0.0;  // sign: unlock direction; |.|: radius in m
};

class GraspRefiner {
 public:
  virtual ~GraspRefiner() = default;
  // Pure given (observation, episode_seed); throws EmptyMaskError.
  virtual GraspPrediction refine(const Observation& obs,
                                 std::uint64_t episode_seed) const = 0;
  virtual const char* name() const = 0;
};

class CentroidBaseline final : public GraspRefiner {
 public:
  explicit CentroidBaseline(const PerceptionConfig& cfg) : cfg_(cfg) {}
  GraspPrediction refine(const Observation& obs, std::uint64_t seed) const override;
  const char* name() const override { return "centroid"; }

 private:
  PerceptionConfig cfg_;
};

class GeometricOracle final : public GraspRefiner {
 public:
  explicit GeometricOracle(const PerceptionConfig& cfg) : cfg_(cfg) {}
  GraspPrediction refine(const Observation& obs, std::uint64_t seed) const override;
  const char* name() const override { return "oracle"; }

 private:
  PerceptionConfig cfg_;
};

struct GraspPose {
  Vec3 position_m;
  Quat orientation;
  Vec3 approach_axis;  // unit, anti-parallel to the fitted door normal
};

// Back-projects the predicted grasp pixel onto the fitted plane, aligns the
// approach with -normal and the gripper closing axis with the mask's minor
// principal axis. Throws BehindCameraError when the ray diverges.
GraspPose grasp_pose_from_prediction(const GraspPrediction& pred,
                                     const PlaneFit& plane,
                                     const Observation& obs);

// Minor principal axis (unit 2D) of the mask's pixel distribution.
Vec2 mask_minor_axis(const Observation& obs);

}  // namespace hado
