#include "hado/world.hpp"

#include <algorithm>
#include <cmath>

#include "hado/errors.hpp"

namespace hado {

namespace {

constexpr double kHandleThicknessM = 0.02;
constexpr double kGripperOpenM = 0.08;

Vec3 rotate_about_y(const Vec3& p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {p.x * c + p.z * s, p.y, -p.x * s + p.z * c};
}

double wrap_angle(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a < -kPi) a += 2 * kPi;
  return a;
}

// Oriented rectangle spanning [p0, p1] with the given half width.
struct RectShape {
  Vec2 p0, p1;
  double half_width;
  bool contains(const Vec2& q) const {
    const Vec2 axis = p1 - p0;
    const double len = axis.norm();
    if (len <= 0.0) return (q - p0).norm() <= half_width;
    const Vec2 u = axis * (1.0 / len);
    const Vec2 rel = q - p0;
    const double along = rel.dot(u);
    const double across = rel.x * -u.y + rel.y * u.x;
    return along >= 0.0 && along <= len && std::abs(across) <= half_width;
  }
};

struct DiscShape {
  Vec2 center;
  double radius;
  bool contains(const Vec2& q) const { return (q - center).norm() <= radius; }
};

}  // namespace

World::World(DoorSpec spec, const Config& cfg, std::uint64_t seed)
    : spec_(std::move(spec)),
      cfg_(cfg),
      rng_(mix_seed(seed, 0x77)),
      render_rng_(mix_seed(seed, 0x3b)) {
  spec_.validate();

  // Normal convention: toward the robot (negative camera-axis component).
  if (spec_.plane_normal.z > 0) spec_.plane_normal = -spec_.plane_normal;

  door_.unlocked = !spec_.has_latch() && !spec_.locked;

  const Vec3 handle0 = closed_handle_position_();
  const double hinge_x = spec_.hinge_side == HingeSide::Left
                             ? spec_.plane_origin_m.x - spec_.door_width_m / 2.0
                             : spec_.plane_origin_m.x + spec_.door_width_m / 2.0;
  hinge_radius_m_ = std::max(0.15, std::abs(handle0.x - hinge_x));
  max_travel_m_ = spec_.swing == SwingType::Slide
                      ? spec_.max_open_angle_rad
                      : spec_.max_open_angle_rad * hinge_radius_m_;

  // Random start pose near the door, facing it.
  const double bearing = rng_.uniform(-0.35, 0.35);
  const double dist = rng_.uniform(1.4, 2.2);
  robot_.base_pose.x_m = handle0.x - dist * std::sin(bearing);
  robot_.base_pose.z_m = handle0.z - dist * std::cos(bearing);
  const double to_handle = std::atan2(handle0.x - robot_.base_pose.x_m,
                                      handle0.z - robot_.base_pose.z_m);
  robot_.base_pose.heading_rad = to_handle + rng_.uniform(-0.17, 0.17);
  robot_.ee_pose.position_m = {robot_.base_pose.x_m, 0.0, robot_.base_pose.z_m + 0.3};
  robot_.ee_pose.orientation = Quat{};
  robot_.gripper_opening_m = kGripperOpenM;
  gripper_target_m_ = kGripperOpenM;
}

Vec3 World::closed_handle_position_() const {
  const Vec3 dir = Camera::ray_direction(spec_.handle.anchor_px);
  const double offset = spec_.plane_normal.dot(spec_.plane_origin_m);
  const double denom = spec_.plane_normal.dot(dir);
  const double t = offset / denom;
  return dir * t;
}

double World::opening_sign_() const {
  // Maps the command's push axis (+ = away from the robot) onto opening
  // travel. Push doors open away; pull doors and drawers open toward.
  return spec_.swing == SwingType::Push ? 1.0 : -1.0;
}

void World::current_plane(Vec3* normal, double* offset) const {
  const Vec3 n0 = spec_.plane_normal;
  if (spec_.swing == SwingType::Slide) {
    // Drawer front translates toward the robot along the normal.
    *normal = n0;
    const Vec3 origin = spec_.plane_origin_m + n0 * door_travel_m_;
    *offset = n0.dot(origin);
    return;
  }
  const double angle = door_travel_m_ / hinge_radius_m_;
  if (angle == 0.0) {
    *normal = n0;
    *offset = n0.dot(spec_.plane_origin_m);
    return;
  }
  const double hinge_x = spec_.hinge_side == HingeSide::Left
                             ? spec_.plane_origin_m.x - spec_.door_width_m / 2.0
                             : spec_.plane_origin_m.x + spec_.door_width_m / 2.0;
  // Hinge line is vertical through (hinge_x, *, z on the closed plane).
  const double hinge_z =
      (n0.dot(spec_.plane_origin_m) - n0.x * hinge_x) / (n0.z != 0.0 ? n0.z : 1e-12);
  const Vec3 hinge{hinge_x, 0.0, hinge_z};

  // Determine which rotation sense moves the handle away from the robot.
  const Vec3 handle0 = closed_handle_position_();
  const Vec3 probe = rotate_about_y(handle0 - hinge, 0.05) + hinge;
  const double push_sign = probe.z > handle0.z ? 1.0 : -1.0;
  const double phi =
      (spec_.swing == SwingType::Push ? push_sign : -push_sign) * angle;

  *normal = rotate_about_y(n0, phi);
  if (normal->z > 0) *normal = -(*normal);
  *offset = normal->dot(hinge);
}

Vec3 World::handle_world_position() const {
  const Vec2 px = door_.gripper_point_px.value_or(spec_.handle.anchor_px);
  Vec3 n;
  double off;
  current_plane(&n, &off);
  const Vec3 dir = Camera::ray_direction(px);
  const double denom = n.dot(dir);
  if (std::abs(denom) < 1e-12) return closed_handle_position_();
  return dir * (off / denom);
}

bool World::fully_open() const {
  if (spec_.swing == SwingType::Slide) return door_travel_m_ >= max_travel_m_ - 1e-6;
  return door_travel_m_ / hinge_radius_m_ > cfg_.planner.success_angle_rad;
}

void World::schedule_disturbance(const Disturbance& d) {
  disturbances_.push_back({d, step_count_});
}

void World::update_engagement_(const Vec2& grasp_px) {
  if (force_miss_once_) {
    force_miss_once_ = false;
    return;
  }
  double best = 1e18;
  for (const auto& seg : spec_.handle.graspable_region)
    best = std::min(best, point_segment_distance(grasp_px, seg.a, seg.b));
  if (best > spec_.handle.capture_radius_px) return;

  Vec3 n;
  double off;
  current_plane(&n, &off);
  const double depth_err = std::abs(n.dot(robot_.ee_pose.position_m) - off);
  if (depth_err > cfg_.primitives.grasp_depth_tol_m) return;

  door_.gripper_engaged = true;
  door_.gripper_point_px = grasp_px;
  // Position control re-anchors on the current mechanism state.
  handle_cmd_rad = door_.handle_angle_rad;
  door_cmd_m_ = door_travel_m_;
}

void World::apply_gripper_(double target_m, const Vec2& grasp_px) {
  gripper_target_m_ = std::max(0.0, target_m);
  if (gripper_target_m_ < kHandleThicknessM) {
    if (!door_.gripper_engaged) update_engagement_(grasp_px);
    robot_.gripper_opening_m =
        door_.gripper_engaged ? kHandleThicknessM : gripper_target_m_;
  } else {
    if (door_.gripper_engaged) {
      door_.gripper_engaged = false;
      door_.gripper_point_px.reset();
      // Spring-loaded handle returns to rest once released.
      door_.handle_angle_rad = 0.0;
      handle_cmd_rad = 0.0;
      door_cmd_m_ = door_travel_m_;
    }
    robot_.gripper_opening_m = gripper_target_m_;
  }
}

HapticSample World::step(const EndEffectorCommand& cmd) {
  ++step_count_;

  robot_.base_pose.x_m += cmd.base_step_m.x;
  robot_.base_pose.z_m += cmd.base_step_m.y;
  robot_.base_pose.heading_rad = wrap_angle(robot_.base_pose.heading_rad + cmd.base_turn_rad);

  double spike_A = 0.0;
  for (const auto& ad : disturbances_) {
    const int begin = ad.start_step + ad.d.at_step;
    if (step_count_ < begin || step_count_ >= begin + ad.d.duration_steps) continue;
    if (ad.d.kind == Disturbance::Kind::CurrentSpike) {
      spike_A += ad.d.amps;
    } else if (ad.d.kind == Disturbance::Kind::ContactLoss && door_.gripper_engaged) {
      door_.gripper_engaged = false;
      door_.gripper_point_px.reset();
      door_.handle_angle_rad = 0.0;
      handle_cmd_rad = 0.0;
      door_cmd_m_ = door_travel_m_;
      robot_.gripper_opening_m = 0.0;
    }
  }

  // Handle rotation under position control.
  double handle_torque_Nm = 0.0;
  if (door_.gripper_engaged && cmd.handle_step_rad != 0.0)
    handle_cmd_rad += cmd.handle_step_rad;
  if (door_.gripper_engaged) {
    double lo = -spec_.handle.hard_stop_slack_rad;
    double hi = spec_.handle.hard_stop_slack_rad;
    if (!spec_.locked) {
      const auto dir = spec_.handle.unlock_direction;
      const double full =
          spec_.handle.unlock_angle_rad + spec_.handle.hard_stop_slack_rad;
      if (dir == UnlockDirection::CCW || dir == UnlockDirection::Either) hi = full;
      if (dir == UnlockDirection::CW || dir == UnlockDirection::Either) lo = -full;
    }
    door_.handle_angle_rad = clamp(handle_cmd_rad, lo, hi);
    handle_torque_Nm = cfg_.world.handle_stiffness_Nm_per_rad *
                       std::abs(handle_cmd_rad - door_.handle_angle_rad);
    if (!spec_.locked && !door_.unlocked) {
      const auto dir = spec_.handle.unlock_direction;
      const bool ccw_ok = (dir == UnlockDirection::CCW || dir == UnlockDirection::Either) &&
                          door_.handle_angle_rad >= spec_.handle.unlock_angle_rad - 1e-12;
      const bool cw_ok = (dir == UnlockDirection::CW || dir == UnlockDirection::Either) &&
                         door_.handle_angle_rad <= -spec_.handle.unlock_angle_rad + 1e-12;
      if (ccw_ok || cw_ok) door_.unlocked = true;  // monotone within the episode
    }
  }

  // Door travel under position control.
  double door_torque_Nm = 0.0;
  if (door_.gripper_engaged) {
    door_cmd_m_ += cmd.door_step_m * opening_sign_();
    const bool latch_holds = !door_.unlocked && door_travel_m_ == 0.0;
    door_travel_m_ = latch_holds ? 0.0 : clamp(door_cmd_m_, 0.0, max_travel_m_);
    const double blocked = door_cmd_m_ - door_travel_m_;
    door_torque_Nm = cfg_.world.door_resist_stiffness_N_per_m * std::abs(blocked) *
                     cfg_.world.ee_lever_arm_m;
    if (spec_.swing == SwingType::Pull && blocked < -cfg_.world.wedge_threshold_m &&
        !hazard_) {
      hazard_ = true;
      hazard_reason_ = "gripper wedged: pull-type door driven into its frame";
    }
  }
  door_.door_angle_rad = spec_.swing == SwingType::Slide
                             ? door_travel_m_
                             : door_travel_m_ / hinge_radius_m_;

  // End effector: anchored to the handle while engaged, free otherwise.
  if (cmd.ee_orientation) robot_.ee_pose.orientation = cmd.ee_orientation->normalized();
  if (door_.gripper_engaged) {
    robot_.ee_pose.position_m = handle_world_position();
  } else {
    robot_.ee_pose.position_m += cmd.ee_step_m;
    robot_.ee_pose.position_m.x += cmd.base_step_m.x;
    robot_.ee_pose.position_m.z += cmd.base_step_m.y;
  }

  if (cmd.gripper_target_m)
    apply_gripper_(*cmd.gripper_target_m, Camera::project(robot_.ee_pose.position_m));

  HapticSample sample;
  sample.t_s = time_s();
  for (int j = 0; j < kJointCount; ++j)
    sample.joint_currents_A[j] =
        cfg_.world.free_current_A + rng_.normal(0.0, cfg_.world.current_noise_sigma_A);
  sample.joint_currents_A[kElbowJoint] +=
      cfg_.world.current_gain_A_per_Nm * (handle_torque_Nm + door_torque_Nm) + spike_A;
  sample.gripper_resistance = gripper_resistance();
  robot_.joint_currents_A = sample.joint_currents_A;
  return sample;
}

GripperResistance World::gripper_resistance() const {
  return door_.gripper_engaged ? GripperResistance::High : GripperResistance::Low;
}

Observation World::render_observation() {
  const Vec3 handle = handle_world_position();
  const double dx = handle.x - robot_.base_pose.x_m;
  const double dz = handle.z - robot_.base_pose.z_m;
  const double range = std::sqrt(dx * dx + dz * dz);
  const double bearing = wrap_angle(std::atan2(dx, dz) - robot_.base_pose.heading_rad);
  if (range > cfg_.world.view_max_range_m ||
      std::abs(bearing) > cfg_.world.view_half_angle_rad)
    throw NotVisibleError();

  Observation obs;
  obs.handle_type = spec_.handle.handle_type;
  obs.rotation_axis_px = spec_.handle.rotation_axis_px;
  obs.graspable_region = spec_.handle.graspable_region;
  obs.true_unlock_direction = spec_.handle.unlock_direction;
  obs.mask.assign(static_cast<std::size_t>(obs.width) * obs.height, 0);

  // Mask shapes from the handle geometry, in the fixed virtual image.
  std::vector<RectShape> rects;
  std::vector<DiscShape> discs;
  const HandleSpec& h = spec_.handle;
  switch (h.handle_type) {
    case HandleType::Lever: {
      const Vec2 tip = h.anchor_px * 2.0 - h.rotation_axis_px;
      rects.push_back({h.rotation_axis_px, tip, h.extent_px.y / 2.0});
      discs.push_back({h.rotation_axis_px, h.extent_px.y / 2.0});
      break;
    }
    case HandleType::Knob:
      discs.push_back({h.anchor_px, h.extent_px.x / 2.0});
      break;
    case HandleType::Crossbar: {
      const double half = h.extent_px.y / 2.0;
      for (const auto& seg : h.graspable_region) {
        rects.push_back({seg.a, seg.b, half});
        const Vec2 mid = (seg.a + seg.b) * 0.5;
        if (point_segment_distance(h.anchor_px, seg.a, seg.b) > h.extent_px.y) {
          // Offset grip: arms from the grip ends to the mounting line plus the
          // mounting bar itself (the open side of the C).
          rects.push_back({seg.a, {seg.a.x, h.anchor_px.y}, half});
          rects.push_back({seg.b, {seg.b.x, h.anchor_px.y}, half});
          rects.push_back({{seg.a.x, h.anchor_px.y}, {seg.b.x, h.anchor_px.y}, half});
          (void)mid;
        }
      }
      break;
    }
    case HandleType::CabinetHandle: {
      const double half = std::min(h.extent_px.x, h.extent_px.y) / 2.0;
      for (const auto& seg : h.graspable_region) rects.push_back({seg.a, seg.b, half});
      break;
    }
  }

  // Rasterize. Bounding box first, exact containment per pixel.
  double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
  auto grow = [&](const Vec2& p, double r) {
    min_x = std::min(min_x, p.x - r);
    max_x = std::max(max_x, p.x + r);
    min_y = std::min(min_y, p.y - r);
    max_y = std::max(max_y, p.y + r);
  };
  for (const auto& r : rects) {
    grow(r.p0, r.half_width);
    grow(r.p1, r.half_width);
  }
  for (const auto& d : discs) grow(d.center, d.radius);

  const int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
  const int x1 = std::min(obs.width - 1, static_cast<int>(std::ceil(max_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
  const int y1 = std::min(obs.height - 1, static_cast<int>(std::ceil(max_y)));

  std::int64_t sum_x = 0, sum_y = 0, count = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 q{static_cast<double>(x), static_cast<double>(y)};
      bool inside = false;
      for (const auto& r : rects)
        if (r.contains(q)) {
          inside = true;
          break;
        }
      if (!inside)
        for (const auto& d : discs)
          if (d.contains(q)) {
            inside = true;
            break;
          }
      if (inside) {
        obs.mask[static_cast<std::size_t>(y) * obs.width + x] = 1;
        sum_x += x;
        sum_y += y;
        ++count;
      }
    }
  }
  if (count == 0) throw EmptyMaskError();
  obs.mask_area = static_cast<std::size_t>(count);
  obs.centroid_px = {static_cast<double>(sum_x) / count,
                     static_cast<double>(sum_y) / count};

  // Point cloud: samples over the current door plane plus gaussian depth
  // noise, with a fixed count of far outliers.
  Vec3 n;
  double off;
  current_plane(&n, &off);
  const int total = cfg_.world.cloud_points;
  const int n_out = static_cast<int>(
      std::llround(spec_.outlier_fraction * static_cast<double>(total)));
  const int n_in = total - n_out;

  const Vec3 n0 = spec_.plane_normal;
  Vec3 u0 = n0.cross(Vec3{0, 1, 0});
  if (u0.norm() < 1e-9) u0 = {1, 0, 0};
  u0 = u0.normalized();
  const Vec3 v0 = n0.cross(u0).normalized();

  const double hinge_x = spec_.hinge_side == HingeSide::Left
                             ? spec_.plane_origin_m.x - spec_.door_width_m / 2.0
                             : spec_.plane_origin_m.x + spec_.door_width_m / 2.0;
  const double angle = spec_.swing == SwingType::Slide
                           ? 0.0
                           : door_travel_m_ / hinge_radius_m_;
  double phi = 0.0;
  Vec3 hinge{};
  if (angle != 0.0) {
    const double hinge_z = (n0.dot(spec_.plane_origin_m) - n0.x * hinge_x) /
                           (n0.z != 0.0 ? n0.z : 1e-12);
    hinge = {hinge_x, 0.0, hinge_z};
    const Vec3 handle0 = closed_handle_position_();
    const Vec3 probe = rotate_about_y(handle0 - hinge, 0.05) + hinge;
    const double push_sign = probe.z > handle0.z ? 1.0 : -1.0;
    phi = (spec_.swing == SwingType::Push ? push_sign : -push_sign) * angle;
  }
  const Vec3 slide_shift =
      spec_.swing == SwingType::Slide ? n0 * door_travel_m_ : Vec3{};

  for (int i = 0; i < n_in; ++i) {
    const double a = render_rng_.uniform(-spec_.door_width_m / 2.0,
                                         spec_.door_width_m / 2.0);
    const double b = render_rng_.uniform(-spec_.door_height_m / 2.0,
                                         spec_.door_height_m / 2.0);
    Vec3 p = spec_.plane_origin_m + u0 * a + v0 * b;
    if (phi != 0.0) p = rotate_about_y(p - hinge, phi) + hinge;
    p += slide_shift;
    p += n * render_rng_.normal(0.0, spec_.point_cloud_noise_sigma_m);
    obs.cloud.push_back(p);
  }
  const double out_margin = std::max(3.5 * spec_.point_cloud_noise_sigma_m, 0.02);
  Vec3 box_center = spec_.plane_origin_m + slide_shift;
  if (phi != 0.0) box_center = rotate_about_y(box_center - hinge, phi) + hinge;
  int emitted = 0;
  while (emitted < n_out) {
    const Vec3 p = box_center + Vec3{render_rng_.uniform(-0.5, 0.5),
                                     render_rng_.uniform(-0.5, 0.5),
                                     render_rng_.uniform(-0.5, 0.5)};
    if (std::abs(n.dot(p) - off) <= out_margin) continue;  // outliers stay out
    obs.cloud.push_back(p);
    ++emitted;
  }
  return obs;
}

}  // namespace hado
