#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "hado/config.hpp"
#include "hado/harness.hpp"
#include "hado/primitives.hpp"
#include "hado/world.hpp"

using namespace hado;

namespace {

const std::string kDataDir = HADO_DATA_DIR;

Config default_config() { return load_config(kDataDir + "/default.cfg"); }

DoorSpec door_by_id(const std::string& suite, const std::string& id) {
  for (const DoorSpec& d : load_suite(kDataDir + "/" + suite))
    if (d.id == id) return d;
  FAIL("no door ", id);
  return {};
}

struct Rig {
  Config cfg;
  World world;
  std::unique_ptr<GraspRefiner> refiner;
  ExecContext ctx;

  Rig(const DoorSpec& door, const Config& config, std::uint64_t seed,
      bool oracle = true, FeedbackMode mode = FeedbackMode::Haptic,
      FaultPlan fault = {})
      : cfg(config),
        world(door, cfg, mix_seed(seed, 0x01)),
        refiner(oracle ? std::unique_ptr<GraspRefiner>(
                             std::make_unique<GeometricOracle>(cfg.perception))
                       : std::make_unique<CentroidBaseline>(cfg.perception)),
        ctx(world, cfg, *refiner, mix_seed(seed, 0x02), mode, fault) {}
};

double wrap_angle(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a < -kPi) a += 2 * kPi;
  return a;
}

}  // namespace

TEST_CASE("approach drives to the preset pose in front of the handle") {
  Config cfg = default_config();
  DoorSpec door = door_by_id("suite_field20", "lever_pull_cw_01");
  door.point_cloud_noise_sigma_m = 0.0;
  door.outlier_fraction = 0.0;
  Rig rig(door, cfg, 3);

  const PrimitiveOutcome out = approach(rig.ctx);
  REQUIRE(out.ok());
  CHECK(out.duration_steps <= cfg.primitives.step_budget);

  // Closed-form target: handle ray onto the true plane, offset along the
  // robot-facing normal, heading toward the handle.
  Vec3 n;
  double off;
  rig.world.current_plane(&n, &off);
  const Observation obs = rig.world.render_observation();
  const Vec3 ray = Camera::ray_direction(obs.centroid_px);
  const Vec3 handle = ray * (off / n.dot(ray));
  const Vec2 n_xz = Vec2{n.x, n.z}.normalized();
  const Vec2 target{handle.x + cfg.primitives.approach_offset_m * n_xz.x,
                    handle.z + cfg.primitives.approach_offset_m * n_xz.y};

  const Pose2& base = rig.world.robot().base_pose;
  CHECK(std::hypot(base.x_m - target.x, base.z_m - target.y) < 0.011);
  const double want = std::atan2(handle.x - base.x_m, handle.z - base.z_m);
  CHECK(std::abs(wrap_angle(want - base.heading_rad)) < deg_to_rad(1.01));

  // Re-running from the preset pose costs no base motion.
  const PrimitiveOutcome again = approach(rig.ctx);
  CHECK(again.ok());
  CHECK(again.duration_steps <= 1);
}

TEST_CASE("approach tolerates a heavily contaminated cloud") {
  Config cfg = default_config();
  DoorSpec door = door_by_id("suite_field20", "lever_pull_cw_01");
  door.outlier_fraction = 0.3;
  door.point_cloud_noise_sigma_m = 0.002;

  Vec2 clean_target;
  {
    DoorSpec quiet = door;
    quiet.outlier_fraction = 0.0;
    quiet.point_cloud_noise_sigma_m = 0.0;
    Rig rig(quiet, cfg, 1);
    approach(rig.ctx);
    clean_target = {rig.world.robot().base_pose.x_m, rig.world.robot().base_pose.z_m};
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rig rig(door, cfg, seed);
    REQUIRE(approach(rig.ctx).ok());
    const Pose2& base = rig.world.robot().base_pose;
    CAPTURE(seed);
    CHECK(std::hypot(base.x_m - clean_target.x, base.z_m - clean_target.y) < 0.02);
  }
}

TEST_CASE("grasp succeeds on a lever with the refined prediction") {
  const Config cfg = default_config();
  Rig rig(door_by_id("suite_field20", "lever_pull_cw_01"), cfg, 4);
  REQUIRE(approach(rig.ctx).ok());
  const PrimitiveOutcome out = grasp(rig.ctx);
  CHECK(out.ok());
  CHECK(rig.world.door().gripper_engaged);  // world ground truth agrees
  CHECK(rig.world.gripper_resistance() == GripperResistance::High);
}

TEST_CASE("centroid grasp misses the C-shaped crossbar") {
  const Config cfg = default_config();
  Rig rig(door_by_id("suite_ablation5", "ab_crossbar_c_01"), cfg, 4,
          /*oracle=*/false);
  REQUIRE(approach(rig.ctx).ok());
  const PrimitiveOutcome out = grasp(rig.ctx);
  REQUIRE(out.error.has_value());
  CHECK(*out.error == ErrorCode::GraspMiss);
  CHECK_FALSE(rig.world.door().gripper_engaged);
}

TEST_CASE("grasp pose outside the workspace box fails inverse kinematics") {
  const Config cfg = default_config();
  DoorSpec door = door_by_id("suite_field20", "lever_pull_cw_01");
  // Same door mounted far up on a deep plane: the back-projected grasp sits
  // well above the reachable band.
  door.handle.anchor_px = {330, 30};
  door.handle.rotation_axis_px = {370, 30};
  door.handle.graspable_region = {{{346, 30}, {297, 30}}};
  door.plane_origin_m = {0, -0.8, 3.0};
  door.door_height_m = 2.6;
  Rig rig(door, cfg, 5);
  REQUIRE(approach(rig.ctx).ok());
  const PrimitiveOutcome out = grasp(rig.ctx);
  REQUIRE(out.error.has_value());
  CHECK(*out.error == ErrorCode::GraspIkFail);
}

TEST_CASE("unlock follows the predicted direction and reverses when wrong") {
  Config cfg = default_config();
  DoorSpec door = door_by_id("suite_field20", "lever_pull_cw_01");

  SUBCASE("perfect prior: no reversal") {
    cfg.perception.direction_prior_accuracy = 1.0;
    Rig rig(door, cfg, 6);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    const PrimitiveOutcome out = unlock_lever(rig.ctx);
    CHECK(out.ok());
    CHECK(rig.world.door().unlocked);
    CHECK(out.telemetry.reversals == 0);
    REQUIRE(out.telemetry.initial_direction.has_value());
    CHECK(*out.telemetry.initial_direction == RotationDirection::CW);
  }
  SUBCASE("inverted prior: exactly one reversal, then success") {
    cfg.perception.direction_prior_accuracy = 0.0;
    Rig rig(door, cfg, 6);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    const PrimitiveOutcome out = unlock_lever(rig.ctx);
    CHECK(out.ok());
    CHECK(rig.world.door().unlocked);
    CHECK(out.telemetry.reversals == 1);
    CHECK(*out.telemetry.initial_direction == RotationDirection::CCW);
    CHECK(*out.telemetry.final_direction == RotationDirection::CW);
  }
}

TEST_CASE("unlock works for knobs through the same monitoring loop") {
  Config cfg = default_config();
  cfg.perception.direction_prior_accuracy = 0.0;  // force the exploration path
  Rig rig(door_by_id("suite_field20", "knob_push_ccw_02"), cfg, 7);
  REQUIRE(approach(rig.ctx).ok());
  REQUIRE(grasp(rig.ctx).ok());
  const PrimitiveOutcome out = unlock_knob(rig.ctx);
  CHECK(out.ok());
  CHECK(out.primitive == PrimitiveId::UnlockKnob);
  CHECK(out.telemetry.reversals == 1);
  CHECK(rig.world.door().unlocked);
}

TEST_CASE("hard-locked door stops in both directions and reports a collision") {
  const Config cfg = default_config();
  DoorSpec door = door_by_id("suite_field20", "lever_pull_cw_01");
  door.locked = true;
  door.handle.unlock_direction = UnlockDirection::None;
  door.handle.unlock_angle_rad = 0.0;
  door.handle.hard_stop_slack_rad = 0.0;
  Rig rig(door, cfg, 8);
  REQUIRE(approach(rig.ctx).ok());
  REQUIRE(grasp(rig.ctx).ok());
  const PrimitiveOutcome out = unlock_lever(rig.ctx);
  REQUIRE(out.error.has_value());
  CHECK(*out.error == ErrorCode::UnlockCollision);
  CHECK(out.telemetry.reversals == 1);
  CHECK_FALSE(rig.world.door().unlocked);
}

TEST_CASE("open classifies the swing from the probe and opens the door") {
  const Config cfg = default_config();

  SUBCASE("pull door") {
    Rig rig(door_by_id("suite_field20", "lever_pull_cw_01"), cfg, 9);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    REQUIRE(unlock_lever(rig.ctx).ok());
    const PrimitiveOutcome out = open_door(rig.ctx);
    CHECK(out.ok());
    REQUIRE(out.telemetry.classified_swing.has_value());
    CHECK(*out.telemetry.classified_swing == SwingClass::Pull);
    CHECK(rig.world.door().door_angle_rad > cfg.planner.success_angle_rad);
  }
  SUBCASE("push door") {
    Rig rig(door_by_id("suite_field20", "lever_push_ccw_02"), cfg, 9);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    REQUIRE(unlock_lever(rig.ctx).ok());
    const PrimitiveOutcome out = open_door(rig.ctx);
    CHECK(out.ok());
    CHECK(*out.telemetry.classified_swing == SwingClass::Push);
    CHECK(rig.world.door().door_angle_rad > cfg.planner.success_angle_rad);
  }
  SUBCASE("drawer classifies as pull and extends fully") {
    Rig rig(door_by_id("suite_field20", "drawer_slide_01"), cfg, 9);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    const PrimitiveOutcome out = open_door(rig.ctx);
    CHECK(out.ok());
    CHECK(*out.telemetry.classified_swing == SwingClass::Pull);
    CHECK(rig.world.fully_open());
  }
}

TEST_CASE("contact loss mid-drive surfaces as an open miss") {
  const Config cfg = default_config();
  FaultPlan fault;
  fault.inject = ErrorCode::OpenMiss;
  Rig rig(door_by_id("suite_field20", "lever_pull_cw_01"), cfg, 10,
          /*oracle=*/true, FeedbackMode::Haptic, fault);
  REQUIRE(approach(rig.ctx).ok());
  REQUIRE(grasp(rig.ctx).ok());
  REQUIRE(unlock_lever(rig.ctx).ok());
  const PrimitiveOutcome out = open_door(rig.ctx);
  REQUIRE(out.error.has_value());
  CHECK(*out.error == ErrorCode::OpenMiss);
  CHECK(rig.world.door().door_angle_rad > 0.0);  // the drive had begun
  CHECK_FALSE(rig.world.door().gripper_engaged);
}

TEST_CASE("traverse") {
  const Config cfg = default_config();

  SUBCASE("push door: base ends up beyond the door plane") {
    Rig rig(door_by_id("suite_field20", "crossbar_push_01"), cfg, 11);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    REQUIRE(open_door(rig.ctx).ok());
    const PrimitiveOutcome out = traverse(rig.ctx);
    CHECK(out.ok());
    CHECK(rig.world.robot().base_pose.z_m >
          rig.world.spec().plane_origin_m.z);
  }
  SUBCASE("pull door: scripted hold-and-pass with a fixed cost") {
    Rig rig(door_by_id("suite_field20", "lever_pull_cw_01"), cfg, 11);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    REQUIRE(unlock_lever(rig.ctx).ok());
    REQUIRE(open_door(rig.ctx).ok());
    const PrimitiveOutcome out = traverse(rig.ctx);
    CHECK(out.ok());
    CHECK(out.duration_steps == 120);
  }
  SUBCASE("drawer: success as a no-op") {
    Rig rig(door_by_id("suite_field20", "drawer_slide_02"), cfg, 11);
    REQUIRE(approach(rig.ctx).ok());
    REQUIRE(grasp(rig.ctx).ok());
    REQUIRE(open_door(rig.ctx).ok());
    const PrimitiveOutcome out = traverse(rig.ctx);
    CHECK(out.ok());
    CHECK(out.duration_steps == 0);
  }
}

TEST_CASE("error codes correspond to their world-level causes") {
  const Config cfg = default_config();
  const auto doors = load_suite(kDataDir + "/suite_field20");
  const double band = cfg.world.current_threshold_A * cfg.haptics.collision_factor;

  for (std::size_t i = 0; i < doors.size(); ++i) {
    const FaultPlan fault = rotated_fault(doors[i], i);
    EpisodeOptions options;
    options.fault = fault;
    int fault_seen = 0;
    const EpisodeObserver check = [&](PlannerState, const PrimitiveOutcome& o) {
      CHECK(o.duration_steps <= cfg.primitives.step_budget);
      CHECK(o.telemetry.reversals <= 1);
      if (!o.error) return;
      if (*o.error == fault.inject) ++fault_seen;
      switch (*o.error) {
        case ErrorCode::GraspMiss:
        case ErrorCode::UnlockMiss:
        case ErrorCode::OpenMiss:
          // Engagement lost: the trace ends with low gripper resistance.
          REQUIRE_FALSE(o.telemetry.trace.empty());
          CHECK(o.telemetry.trace.samples.back().gripper_resistance ==
                GripperResistance::Low);
          break;
        case ErrorCode::UnlockCollision:
        case ErrorCode::OpenCollision: {
          double peak = 0.0;
          for (const auto& s : o.telemetry.trace.samples)
            peak = std::max(peak, s.elbow_A());
          CHECK((peak >= band || o.telemetry.hazard));
          break;
        }
        case ErrorCode::GraspIkFail:
          break;  // planning-level, no trace signature
      }
    };
    const EpisodeRecord rec = run_episode(doors[i], 1000 + i, cfg, options, check);
    CAPTURE(doors[i].id);
    CHECK(rec.success);
    CHECK(fault_seen == 1);
  }
}
