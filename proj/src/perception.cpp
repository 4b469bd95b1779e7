#include "hado/perception.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hado/errors.hpp"
#include "hado/rng.hpp"

namespace hado {

namespace {

// Smallest-eigenvalue eigenvector of a symmetric 3x3 matrix via cyclic Jacobi.
Vec3 smallest_eigenvector(std::array<std::array<double, 3>, 3> a) {
  std::array<std::array<double, 3>, 3> v = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int sweep = 0; sweep < 32; ++sweep) {
    double offdiag = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (offdiag < 1e-15) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a[p][q]) < 1e-18) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (a[i][i] < a[best][best]) best = i;
  return Vec3{v[0][best], v[1][best], v[2][best]}.normalized();
}

PlaneFit orient_toward_robot(PlaneFit fit) {
  if (fit.normal.z > 0) {
    fit.normal = -fit.normal;
    fit.offset_m = -fit.offset_m;
  }
  return fit;
}

PlaneFit ls_fit_on(const PointCloud& cloud, const std::uint32_t* idx, std::size_t n) {
  Vec3 c{};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = idx ? idx[k] : k;
    c += cloud.point(i);
  }
  c = c * (1.0 / static_cast<double>(n));
  std::array<std::array<double, 3>, 3> cov{};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = idx ? idx[k] : k;
    const Vec3 d = cloud.point(i) - c;
    cov[0][0] += d.x * d.x;
    cov[0][1] += d.x * d.y;
    cov[0][2] += d.x * d.z;
    cov[1][1] += d.y * d.y;
    cov[1][2] += d.y * d.z;
    cov[2][2] += d.z * d.z;
  }
  cov[1][0] = cov[0][1];
  cov[2][0] = cov[0][2];
  cov[2][1] = cov[1][2];
  PlaneFit fit;
  fit.normal = smallest_eigenvector(cov);
  fit.offset_m = fit.normal.dot(c);
  return orient_toward_robot(fit);
}

}  // namespace

PlaneFit fit_plane_least_squares(const PointCloud& cloud) {
  if (cloud.size() < 3) throw TooFewPointsError();
  PlaneFit fit = ls_fit_on(cloud, nullptr, cloud.size());
  fit.inlier_count = static_cast<int>(cloud.size());
  return fit;
}

PlaneFit ransac_plane(const PointCloud& cloud, double inlier_threshold_m,
                      int iterations, std::uint64_t seed) {
  const std::size_t n = cloud.size();
  if (n < 3) throw TooFewPointsError();
  if (iterations < 1) iterations = 1;

  Rng rng(splitmix64(seed ^ 0x51a0c3f7u));
  const auto view = cloud.view();

  double best_nx = 0, best_ny = 0, best_nz = 0, best_off = 0;
  std::size_t best_count = 0;
  bool found = false;

  for (int it = 0; it < iterations; ++it) {
    const std::size_t i = rng.uniform_index(n);
    std::size_t j = rng.uniform_index(n);
    std::size_t k = rng.uniform_index(n);
    if (i == j || i == k || j == k) continue;
    const Vec3 a = cloud.point(i);
    const Vec3 ab = cloud.point(j) - a;
    const Vec3 ac = cloud.point(k) - a;
    const Vec3 cr = ab.cross(ac);
    const double len = cr.norm();
    if (len < 1e-12) continue;  // collinear triple
    const Vec3 nrm = cr * (1.0 / len);
    const double off = nrm.dot(a);
    const std::size_t count =
        kernels::count_inliers(view, nrm.x, nrm.y, nrm.z, off, inlier_threshold_m);
    if (count > best_count) {
      best_count = count;
      best_nx = nrm.x;
      best_ny = nrm.y;
      best_nz = nrm.z;
      best_off = off;
      found = true;
    }
  }
  if (!found) throw DegenerateCloudError();

  std::vector<std::uint32_t> inliers(n);
  const std::size_t m = kernels::collect_inliers(view, best_nx, best_ny, best_nz,
                                                 best_off, inlier_threshold_m,
                                                 inliers.data());
  PlaneFit fit = m >= 3 ? ls_fit_on(cloud, inliers.data(), m)
                        : orient_toward_robot(PlaneFit{{best_nx, best_ny, best_nz},
                                                       best_off, 0, 0});
  fit.inlier_threshold_m = inlier_threshold_m;
  fit.inlier_count = static_cast<int>(kernels::count_inliers(
      view, fit.normal.x, fit.normal.y, fit.normal.z, fit.offset_m,
      inlier_threshold_m));
  return fit;
}

namespace {

double median_depth(const PointCloud& cloud) {
  std::vector<double> zs(cloud.zs);
  const std::size_t mid = zs.size() / 2;
  std::nth_element(zs.begin(), zs.begin() + mid, zs.end());
  return zs[mid];
}

// Direction prior: correct with probability `accuracy`, decided once per
// episode so repeated refinements within an episode agree.
double signed_direction_prior(UnlockDirection truth, double accuracy,
                              std::uint64_t episode_seed) {
  double sign = kCcwSign;
  if (truth == UnlockDirection::CW) sign = -kCcwSign;
  if (truth == UnlockDirection::Either || truth == UnlockDirection::None)
    return kCcwSign;
  const double draw =
      (splitmix64(episode_seed ^ 0xd1ce5bb1u) >> 11) * 0x1.0p-53;
  return draw < accuracy ? sign : -sign;
}

}  // namespace

GraspPrediction CentroidBaseline::refine(const Observation& obs,
                                         std::uint64_t /*seed*/) const {
  if (obs.mask_area == 0) throw EmptyMaskError();
  GraspPrediction pred;
  pred.dx_px = 0.0;
  pred.dy_px = 0.0;
  pred.rotation_param_R = kCcwSign * cfg_.centroid_prior_radius_m;
  return pred;
}

GraspPrediction GeometricOracle::refine(const Observation& obs,
                                        std::uint64_t seed) const {
  if (obs.mask_area == 0) throw EmptyMaskError();

  Vec2 grasp = obs.centroid_px;
  if (obs.handle_type == HandleType::Lever || obs.handle_type == HandleType::Crossbar) {
    // Farthest point of the graspable skeleton from the rotation axis; for a
    // segment set that is always one of the endpoints.
    double best = -1.0;
    for (const auto& seg : obs.graspable_region) {
      for (const Vec2& cand : {seg.a, seg.b}) {
        const double d = (cand - obs.rotation_axis_px).norm();
        if (d > best) {
          best = d;
          grasp = cand;
        }
      }
    }
  }
  grasp.x = clamp(grasp.x, 0.0, obs.width - 1.0);
  grasp.y = clamp(grasp.y, 0.0, obs.height - 1.0);

  const double pitch = Camera::pixel_pitch_m(median_depth(obs.cloud));
  double radius_px;
  if (obs.handle_type == HandleType::Knob) {
    // Equivalent-disc radius of the mask: the knob itself is the lever arm.
    radius_px = std::sqrt(static_cast<double>(obs.mask_area) / kPi);
  } else {
    radius_px = (grasp - obs.rotation_axis_px).norm();
  }

  GraspPrediction pred;
  pred.dx_px = grasp.x - obs.centroid_px.x;
  pred.dy_px = grasp.y - obs.centroid_px.y;
  const double sign = signed_direction_prior(
      obs.true_unlock_direction, cfg_.direction_prior_accuracy, seed);
  pred.rotation_param_R = sign * std::max(radius_px * pitch, 1e-6);
  return pred;
}

Vec2 mask_minor_axis(const Observation& obs) {
  double sxx = 0, sxy = 0, syy = 0;
  const double cx = obs.centroid_px.x, cy = obs.centroid_px.y;
  for (int y = 0; y < obs.height; ++y) {
    for (int x = 0; x < obs.width; ++x) {
      if (!obs.at(x, y)) continue;
      const double dx = x - cx, dy = y - cy;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
  }
  // Eigenvector of the smaller eigenvalue of [[sxx, sxy], [sxy, syy]].
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double lam = tr / 2.0 - std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  Vec2 axis{sxy, lam - sxx};
  if (axis.norm() < 1e-9) axis = sxx <= syy ? Vec2{1, 0} : Vec2{0, 1};
  return axis.normalized();
}

GraspPose grasp_pose_from_prediction(const GraspPrediction& pred,
                                     const PlaneFit& plane, const Observation& obs) {
  const Vec2 px{obs.centroid_px.x + pred.dx_px, obs.centroid_px.y + pred.dy_px};
  const Vec3 ray = Camera::ray_direction(px);
  const double denom = plane.normal.dot(ray);
  if (std::abs(denom) < 1e-9) throw BehindCameraError();
  const double t = plane.offset_m / denom;
  if (t <= 0.0) throw BehindCameraError();

  GraspPose pose;
  pose.position_m = ray * t;
  pose.approach_axis = -plane.normal;  // normal faces the robot; approach into the door

  // Gripper closing axis: the mask's minor principal axis lifted onto the plane.
  Vec3 u = plane.normal.cross(Vec3{0, 1, 0});
  if (u.norm() < 1e-9) u = {1, 0, 0};
  u = u.normalized();
  const Vec3 v = plane.normal.cross(u).normalized();
  const Vec2 minor = mask_minor_axis(obs);
  // In-plane image axes: u is horizontal-like, v vertical-like.
  Vec3 closing = (u * minor.x + v * minor.y).normalized();

  const Vec3 ez = pose.approach_axis.normalized();
  Vec3 ex = (closing - ez * closing.dot(ez)).normalized();
  const Vec3 ey = ez.cross(ex).normalized();
  pose.orientation = quat_from_axes(ex, ey, ez);
  return pose;
}

}  // namespace hado
