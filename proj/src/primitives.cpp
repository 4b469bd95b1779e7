#include "hado/primitives.hpp"

#include <cmath>

#include "hado/errors.hpp"

namespace hado {

const char* to_string(PrimitiveId p) {
  switch (p) {
    case PrimitiveId::Approach: return "approach";
    case PrimitiveId::Grasp: return "grasp";
    case PrimitiveId::UnlockLever: return "unlock-lever";
    case PrimitiveId::UnlockKnob: return "unlock-knob";
    case PrimitiveId::Open: return "open";
    case PrimitiveId::Traverse: return "traverse";
  }
  return "?";
}

const char* to_string(ErrorCode e) {
  switch (e) {
    case ErrorCode::GraspIkFail: return "GRASP_IK_FAIL";
    case ErrorCode::GraspMiss: return "GRASP_MISS";
    case ErrorCode::UnlockMiss: return "UNLOCK_MISS";
    case ErrorCode::UnlockCollision: return "UNLOCK_COLLISION";
    case ErrorCode::OpenMiss: return "OPEN_MISS";
    case ErrorCode::OpenCollision: return "OPEN_COLLISION";
  }
  return "?";
}

std::optional<ErrorCode> error_code_from_string(const std::string& s) {
  for (ErrorCode e : {ErrorCode::GraspIkFail, ErrorCode::GraspMiss,
                      ErrorCode::UnlockMiss, ErrorCode::UnlockCollision,
                      ErrorCode::OpenMiss, ErrorCode::OpenCollision})
    if (s == to_string(e)) return e;
  return std::nullopt;
}

std::string PrimitiveOutcome::result_string() const {
  return error ? to_string(*error) : "SUCCESS";
}

bool ExecContext::take_fault(ErrorCode code) {
  if (fault_fired || !fault.inject || *fault.inject != code) return false;
  fault_fired = true;
  return true;
}

namespace {

constexpr int kTraverseScriptSteps = 120;

// Runs world steps for one primitive, accumulating the telemetry trace and
// enforcing the per-primitive step budget.
struct Runner {
  ExecContext& ctx;
  PrimitiveTelemetry& telemetry;
  int steps = 0;

  HapticSample step(const EndEffectorCommand& cmd) {
    const HapticSample s = ctx.world.step(cmd);
    telemetry.trace.append(s);
    ++steps;
    return s;
  }
  bool budget_left() const { return steps < ctx.cfg.primitives.step_budget; }
};

Vec3 base_relative(const Vec3& p, const Pose2& base) {
  const double dx = p.x - base.x_m;
  const double dz = p.z - base.z_m;
  const double c = std::cos(base.heading_rad), s = std::sin(base.heading_rad);
  return {dx * c - dz * s, p.y, dx * s + dz * c};
}

double wrap_angle(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a < -kPi) a += 2 * kPi;
  return a;
}

PrimitiveOutcome finish(PrimitiveId id, std::optional<ErrorCode> error,
                        PrimitiveTelemetry telemetry, const Runner& r) {
  PrimitiveOutcome out;
  out.primitive = id;
  out.error = error;
  out.telemetry = std::move(telemetry);
  out.telemetry.hazard = r.ctx.world.hazard();
  out.duration_steps = r.steps;
  return out;
}

// Drives the end effector through a DMP reach to the goal, via an
// intermediate point lifted above and short of the handle.
void dmp_reach(Runner& r, const Vec3& goal, const Vec3& approach_axis,
               const Quat& final_orientation) {
  const Config& cfg = r.ctx.cfg;
  const DmpParams reach = default_reach_dmp(cfg.dmp);

  const Vec3 start = r.ctx.world.robot().ee_pose.position_m;
  const Vec3 via = goal - approach_axis * 0.08 + Vec3{0.0, -0.04, 0.0};

  const int seg_steps = std::max(2, cfg.primitives.reach_steps / 2);
  auto run_segment = [&](const Vec3& a, const Vec3& b, bool last) {
    const Trajectory t =
        dmp_rollout(reach, {a.x, a.y, a.z}, {b.x, b.y, b.z}, seg_steps);
    for (std::size_t k = 1; k < t.size() && r.budget_left(); ++k) {
      EndEffectorCommand cmd;
      cmd.ee_step_m = Vec3{t[k][0], t[k][1], t[k][2]} -
                      Vec3{t[k - 1][0], t[k - 1][1], t[k - 1][2]};
      if (last && k == t.size() - 1) cmd.ee_orientation = final_orientation;
      r.step(cmd);
    }
  };
  run_segment(start, via, false);
  run_segment(via, goal, true);
}

std::uint64_t perception_seed(const ExecContext& ctx) {
  return mix_seed(ctx.episode_seed, 0xA11CE, ctx.world.step_count());
}

// Renders an observation, scanning in place while the door is not visible.
Observation render_with_scan(Runner& r) {
  for (;;) {
    try {
      return r.ctx.world.render_observation();
    } catch (const NotVisibleError&) {
      if (!r.budget_left()) throw;
      EndEffectorCommand cmd;
      cmd.base_turn_rad = 0.3;
      r.step(cmd);
    }
  }
}

}  // namespace

PrimitiveOutcome approach(ExecContext& ctx) {
  PrimitiveTelemetry telemetry;
  Runner r{ctx, telemetry};
  const Config& cfg = ctx.cfg;

  Observation obs = render_with_scan(r);
  ctx.plane = ransac_plane(obs.cloud, cfg.perception.ransac_inlier_threshold_m,
                           cfg.perception.ransac_iterations, perception_seed(ctx));

  // Handle point: centroid ray onto the fitted plane.
  const Vec3 ray = Camera::ray_direction(obs.centroid_px);
  const double t = ctx.plane->offset_m / ctx.plane->normal.dot(ray);
  const Vec3 handle = ray * t;

  // Preset pose: offset from the handle along the (robot-facing) normal.
  Vec2 n_xz{ctx.plane->normal.x, ctx.plane->normal.z};
  n_xz = n_xz.normalized();
  const Vec2 target{handle.x + cfg.primitives.approach_offset_m * n_xz.x,
                    handle.z + cfg.primitives.approach_offset_m * n_xz.y};

  const double speed = cfg.primitives.base_speed_m_s * cfg.world.dt_s;
  const double turn_rate = 2.0 * cfg.world.dt_s;
  while (r.budget_left()) {
    const Pose2& base = ctx.world.robot().base_pose;
    const Vec2 delta{target.x - base.x_m, target.y - base.z_m};
    const double dist = delta.norm();
    const double want_heading = std::atan2(handle.x - base.x_m, handle.z - base.z_m);
    const double herr = wrap_angle(want_heading - base.heading_rad);
    if (dist <= cfg.primitives.approach_tolerance_m && std::abs(herr) <= deg_to_rad(1))
      break;
    EndEffectorCommand cmd;
    if (dist > 1e-12) {
      const double step = std::min(speed, dist);
      cmd.base_step_m = delta * (step / dist);
    }
    cmd.base_turn_rad = clamp(herr, -turn_rate, turn_rate);
    r.step(cmd);
  }
  return finish(PrimitiveId::Approach, std::nullopt, std::move(telemetry), r);
}

PrimitiveOutcome grasp(ExecContext& ctx) {
  PrimitiveTelemetry telemetry;
  Runner r{ctx, telemetry};
  const Config& cfg = ctx.cfg;

  Observation obs = render_with_scan(r);
  ctx.plane = ransac_plane(obs.cloud, cfg.perception.ransac_inlier_threshold_m,
                           cfg.perception.ransac_iterations, perception_seed(ctx));
  ctx.prediction = ctx.refiner.refine(obs, ctx.episode_seed);
  ctx.grasp_pose = grasp_pose_from_prediction(*ctx.prediction, *ctx.plane, obs);

  const bool forced_ik_fail = ctx.take_fault(ErrorCode::GraspIkFail);
  const Vec3 local = base_relative(ctx.grasp_pose->position_m,
                                   ctx.world.robot().base_pose);
  if (forced_ik_fail || !cfg.world.workspace_box_m.contains(local))
    return finish(PrimitiveId::Grasp, ErrorCode::GraspIkFail, std::move(telemetry), r);

  if (ctx.take_fault(ErrorCode::GraspMiss)) ctx.world.force_grasp_miss_once();

  dmp_reach(r, ctx.grasp_pose->position_m, ctx.grasp_pose->approach_axis,
            ctx.grasp_pose->orientation);

  EndEffectorCommand close;
  close.gripper_target_m = 0.0;
  const HapticSample s = r.step(close);

  if (ctx.mode == FeedbackMode::OpenLoop)  // resistance channel stubbed
    return finish(PrimitiveId::Grasp, std::nullopt, std::move(telemetry), r);

  if (s.gripper_resistance != GripperResistance::High)
    return finish(PrimitiveId::Grasp, ErrorCode::GraspMiss, std::move(telemetry), r);
  return finish(PrimitiveId::Grasp, std::nullopt, std::move(telemetry), r);
}

namespace {

PrimitiveOutcome unlock_common(ExecContext& ctx, PrimitiveId id) {
  PrimitiveTelemetry telemetry;
  Runner r{ctx, telemetry};
  const Config& cfg = ctx.cfg;
  const World& world = ctx.world;

  if (world.door().unlocked)
    return finish(id, std::nullopt, std::move(telemetry), r);

  // Fault arming: contact loss mid-rotation, or a persistent current spike.
  if (ctx.take_fault(ErrorCode::UnlockMiss))
    ctx.world.schedule_disturbance(
        {Disturbance::Kind::ContactLoss, 12, 1, 0.0});
  if (ctx.take_fault(ErrorCode::UnlockCollision))
    ctx.world.schedule_disturbance(
        {Disturbance::Kind::CurrentSpike, 8,
         3 * cfg.haptics.debounce_window + 8,
         cfg.world.current_threshold_A * (cfg.haptics.collision_factor + 1.5)});

  RotationDirection dir;
  if (ctx.mode == FeedbackMode::OpenLoop) {
    if (!ctx.openloop_direction)
      ctx.openloop_direction = ctx.rng.bernoulli(0.5) ? RotationDirection::CCW
                                                      : RotationDirection::CW;
    dir = *ctx.openloop_direction;
  } else {
    dir = ctx.prediction
              ? direction_from_sign(ctx.prediction->rotation_param_R)
              : RotationDirection::CCW;
  }
  telemetry.initial_direction = dir;

  const double speed = cfg.primitives.rotation_speed_rad_s *
                       (id == PrimitiveId::UnlockKnob ? cfg.primitives.knob_speed_factor
                                                      : 1.0);
  const double step_rad = speed * cfg.world.dt_s;

  if (ctx.mode == FeedbackMode::OpenLoop) {
    // Blind arc in the sampled direction; no monitoring at all.
    const int arc_steps = static_cast<int>(std::ceil(1.6 / step_rad));
    for (int k = 0; k < arc_steps && r.budget_left(); ++k) {
      EndEffectorCommand cmd;
      cmd.handle_step_rad = sign_for_direction(dir) * step_rad;
      r.step(cmd);
      if (world.door().unlocked) break;
    }
    telemetry.final_direction = dir;
    return finish(id, std::nullopt, std::move(telemetry), r);
  }

  bool reversed = false;
  int consecutive = 0;
  int steps_this_direction = 0;
  const int window = cfg.haptics.debounce_window;
  const double threshold = cfg.world.current_threshold_A;

  while (r.budget_left()) {
    EndEffectorCommand cmd;
    cmd.handle_step_rad = sign_for_direction(dir) * step_rad;
    const HapticSample s = r.step(cmd);
    ++steps_this_direction;

    if (detect_contact_lost(s)) {
      telemetry.final_direction = dir;
      return finish(id, ErrorCode::UnlockMiss, std::move(telemetry), r);
    }
    if (world.door().unlocked) {
      telemetry.final_direction = dir;
      return finish(id, std::nullopt, std::move(telemetry), r);
    }

    consecutive = s.elbow_A() > threshold ? consecutive + 1 : 0;
    if (consecutive < window) continue;
    consecutive = 0;

    // Threshold held for a full window: either a hard stop or a collision.
    // Backing the commanded position off kills stop torque; an external
    // spike survives the rewind. Never rewind past where this direction
    // started, or a zero-slack latch would jam the other way.
    const int rewind_steps = std::min(window + 2, steps_this_direction);
    for (int k = 0; k < rewind_steps && r.budget_left(); ++k) {
      EndEffectorCommand rewind;
      rewind.handle_step_rad = -sign_for_direction(dir) * step_rad;
      const HapticSample rs = r.step(rewind);
      if (detect_contact_lost(rs)) {
        telemetry.final_direction = dir;
        return finish(id, ErrorCode::UnlockMiss, std::move(telemetry), r);
      }
    }
    bool persists = true;
    for (int k = 0; k < window && r.budget_left(); ++k) {
      const HapticSample hs = r.step(EndEffectorCommand{});
      if (detect_contact_lost(hs)) {
        telemetry.final_direction = dir;
        return finish(id, ErrorCode::UnlockMiss, std::move(telemetry), r);
      }
      if (hs.elbow_A() <= threshold) persists = false;
    }
    if (persists) {
      // Current stayed high with the arm at rest: obstruction, not a stop.
      telemetry.final_direction = dir;
      return finish(id, ErrorCode::UnlockCollision, std::move(telemetry), r);
    }
    if (reversed) {
      // Hard stop in both directions: latched shut.
      telemetry.final_direction = dir;
      return finish(id, ErrorCode::UnlockCollision, std::move(telemetry), r);
    }
    reversed = true;
    telemetry.reversals += 1;
    dir = opposite(dir);
    steps_this_direction = 0;
  }
  telemetry.final_direction = dir;
  return finish(id, ErrorCode::UnlockCollision, std::move(telemetry), r);
}

}  // namespace

PrimitiveOutcome unlock_lever(ExecContext& ctx) {
  return unlock_common(ctx, PrimitiveId::UnlockLever);
}

PrimitiveOutcome unlock_knob(ExecContext& ctx) {
  return unlock_common(ctx, PrimitiveId::UnlockKnob);
}

PrimitiveOutcome open_door(ExecContext& ctx) {
  PrimitiveTelemetry telemetry;
  Runner r{ctx, telemetry};
  const Config& cfg = ctx.cfg;
  World& world = ctx.world;

  const int window = cfg.haptics.debounce_window;
  const double band = cfg.world.current_threshold_A * cfg.haptics.collision_factor;
  const double probe_step = cfg.haptics.probe_speed_m_s * cfg.world.dt_s;
  const int probe_steps = static_cast<int>(
      std::ceil(cfg.haptics.probe_distance_m / probe_step));

  SwingClass swing = SwingClass::Inconclusive;
  if (ctx.mode == FeedbackMode::OpenLoop) {
    if (!ctx.openloop_swing)
      ctx.openloop_swing =
          ctx.rng.bernoulli(0.5) ? SwingClass::Push : SwingClass::Pull;
    swing = *ctx.openloop_swing;
  } else {
    // Probe: rest for a baseline, a slight backward pull, then return to
    // neutral so any spring load from a blocked pull is released before the
    // committed drive. Collision monitoring stays off here; the resistance
    // response IS the signal.
    auto run_probe = [&]() -> SwingClass {
      double baseline = 0.0;
      for (int k = 0; k < 6 && r.budget_left(); ++k)
        baseline += r.step(EndEffectorCommand{}).elbow_A();
      baseline /= 6.0;
      HapticTrace probe;
      for (int k = 0; k < probe_steps && r.budget_left(); ++k) {
        EndEffectorCommand cmd;
        cmd.door_step_m = -probe_step;
        probe.append(r.step(cmd));
      }
      const SwingClass result =
          classify_push_pull(probe, baseline, cfg.haptics.push_pull_delta_A);
      for (int k = 0; k < probe_steps && r.budget_left(); ++k) {
        EndEffectorCommand cmd;
        cmd.door_step_m = probe_step;
        r.step(cmd);
      }
      return result;
    };
    swing = run_probe();
    if (swing == SwingClass::Inconclusive) swing = run_probe();
    if (swing == SwingClass::Inconclusive) swing = SwingClass::Pull;  // safer stall
    if (ctx.mode == FeedbackMode::CoinFlipSwing)
      swing = ctx.rng.bernoulli(0.5) ? SwingClass::Push : SwingClass::Pull;
  }
  telemetry.classified_swing = swing;

  // Fault arming happens as the committed drive begins.
  if (ctx.take_fault(ErrorCode::OpenMiss))
    world.schedule_disturbance({Disturbance::Kind::ContactLoss, 10, 1, 0.0});
  if (ctx.take_fault(ErrorCode::OpenCollision))
    world.schedule_disturbance(
        {Disturbance::Kind::CurrentSpike, 10, 3 * window + 8,
         cfg.world.current_threshold_A * (cfg.haptics.collision_factor + 1.5)});

  const double drive_sign = swing == SwingClass::Push ? 1.0 : -1.0;
  const double drive_step = cfg.primitives.drive_speed_m_s * cfg.world.dt_s;
  const bool blind = ctx.mode == FeedbackMode::OpenLoop;
  const double blind_distance =
      world.spec().swing == SwingType::Slide
          ? world.max_travel_m()
          : world.hinge_radius_m() * cfg.planner.success_angle_rad * 1.27;
  double driven = 0.0;
  int consecutive = 0;

  while (r.budget_left()) {
    if (world.fully_open())
      return finish(PrimitiveId::Open, std::nullopt, std::move(telemetry), r);
    if (blind && driven >= blind_distance)
      break;  // committed motion finished; outcome judged by the runner

    EndEffectorCommand cmd;
    cmd.door_step_m = drive_sign * drive_step;
    cmd.base_step_m = Vec2{std::sin(world.robot().base_pose.heading_rad),
                           std::cos(world.robot().base_pose.heading_rad)} *
                      (drive_sign * drive_step);
    const HapticSample s = r.step(cmd);
    driven += drive_step;

    if (world.hazard())
      return finish(PrimitiveId::Open, ErrorCode::OpenCollision, std::move(telemetry), r);
    if (blind) continue;

    if (detect_contact_lost(s))
      return finish(PrimitiveId::Open, ErrorCode::OpenMiss, std::move(telemetry), r);

    consecutive = s.elbow_A() > band ? consecutive + 1 : 0;
    if (consecutive < window) continue;
    consecutive = 0;

    // Pause the drive; a real obstruction keeps pressing back.
    bool persists = true;
    for (int k = 0; k < window && r.budget_left(); ++k) {
      const HapticSample hs = r.step(EndEffectorCommand{});
      if (detect_contact_lost(hs))
        return finish(PrimitiveId::Open, ErrorCode::OpenMiss, std::move(telemetry), r);
      if (hs.elbow_A() <= band) persists = false;
    }
    if (persists) {
      // Stop pressing before handing the error up: back the commanded
      // position off until the load drops so the retry starts unloaded.
      // Abort the back-off if it starts loading the other way instead.
      for (int k = 0; k < 60 && r.budget_left(); ++k) {
        const double before = std::abs(world.blocked_door_m());
        EndEffectorCommand back;
        back.door_step_m = -drive_sign * drive_step;
        const HapticSample bs = r.step(back);
        if (std::abs(world.blocked_door_m()) > before + 1e-12) break;
        if (bs.elbow_A() <= cfg.world.current_threshold_A) break;
      }
      return finish(PrimitiveId::Open, ErrorCode::OpenCollision, std::move(telemetry), r);
    }
  }

  if (world.fully_open())
    return finish(PrimitiveId::Open, std::nullopt, std::move(telemetry), r);
  if (blind)
    return finish(PrimitiveId::Open, std::nullopt, std::move(telemetry), r);
  return finish(PrimitiveId::Open, ErrorCode::OpenMiss, std::move(telemetry), r);
}

PrimitiveOutcome traverse(ExecContext& ctx) {
  PrimitiveTelemetry telemetry;
  Runner r{ctx, telemetry};
  const Config& cfg = ctx.cfg;
  const SwingType swing = ctx.world.spec().swing;

  if (swing == SwingType::Slide)  // nothing to pass through
    return finish(PrimitiveId::Traverse, std::nullopt, std::move(telemetry), r);

  if (swing == SwingType::Push) {
    EndEffectorCommand release;
    release.gripper_target_m = 0.08;
    r.step(release);
    const double step = cfg.primitives.base_speed_m_s * cfg.world.dt_s;
    const int steps = static_cast<int>(std::ceil(1.5 / step));
    for (int k = 0; k < steps && r.budget_left(); ++k) {
      EndEffectorCommand cmd;
      const double h = ctx.world.robot().base_pose.heading_rad;
      cmd.base_step_m = Vec2{std::sin(h), std::cos(h)} * step;
      r.step(cmd);
    }
    return finish(PrimitiveId::Traverse, std::nullopt, std::move(telemetry), r);
  }

  // Pull door: pre-defined hold-and-pass sequence, modeled as a fixed cost.
  for (int k = 0; k < kTraverseScriptSteps && r.budget_left(); ++k)
    r.step(EndEffectorCommand{});
  return finish(PrimitiveId::Traverse, std::nullopt, std::move(telemetry), r);
}

}  // namespace hado
