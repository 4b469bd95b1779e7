// Deterministic quasi-static simulation of one door, the robot end-effector
// and base, and the contact responses that generate haptic signals.
//
// Contact model: everything runs under position-control semantics. Commanded
// displacement beyond a mechanical limit does not move anything; it converts
// to torque (stiffness times overshoot), and the elbow joint current is
// gain * |torque| + free current + gaussian noise. Door and handle motion are
// tracked in one "travel" coordinate each, so the same reconciliation code
// serves hinged doors and sliding drawers.
//
// 3D positions are derived, not primary: the handle's world position is the
// camera ray through its pixel intersected with the current door plane. This
// keeps pixel-space grasping, plane fitting, and reach checks mutually
// consistent without a full kinematic chain.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hado/config.hpp"
#include "hado/door.hpp"
#include "hado/geometry.hpp"
#include "hado/haptics.hpp"
#include "hado/observation.hpp"
#include "hado/rng.hpp"

namespace hado {

struct RobotState {
  Pose2 base_pose;
  Pose3 ee_pose;
  double gripper_opening_m = 0.08;
  std::array<double, kJointCount> joint_currents_A{};
};

// One step worth of position-control targets. All displacements are deltas.
struct EndEffectorCommand {
  Vec3 ee_step_m{};
  std::optional<Quat> ee_orientation{};
  double handle_step_rad = 0.0;  // handle rotation increment, needs engagement
  double door_step_m = 0.0;      // + pushes the door away from the robot
  std::optional<double> gripper_target_m{};
  Vec2 base_step_m{};  // (x, z)
  double base_turn_rad = 0.0;
};

// Scripted disturbance for deterministic fault injection.
struct Disturbance {
  enum class Kind { ContactLoss, CurrentSpike };
  Kind kind = Kind::CurrentSpike;
  int at_step = 0;  // relative to the step counter at schedule time
  int duration_steps = 1;
  double amps = 0.0;
};

class World {
 public:
  World(DoorSpec spec, const Config& cfg, std::uint64_t seed);

  // Advances one dt and returns the haptic sample for the new state.
  HapticSample step(const EndEffectorCommand& cmd);

  // Synthetic handle mask + door point cloud from the fixed virtual camera.
  // Throws NotVisibleError when the base is outside the viewing cone.
  Observation render_observation();

  GripperResistance gripper_resistance() const;

  const DoorSpec& spec() const { return spec_; }
  const DoorState& door() const { return door_; }
  const RobotState& robot() const { return robot_; }
  RobotState& mutable_robot() { return robot_; }  // test setup only
  const Config& config() const { return cfg_; }

  double time_s() const { return step_count_ * cfg_.world.dt_s; }
  int step_count() const { return step_count_; }

  bool hazard() const { return hazard_; }
  const std::string& hazard_reason() const { return hazard_reason_; }

  // Fault-injection hooks.
  void schedule_disturbance(const Disturbance& d);
  void force_grasp_miss_once() { force_miss_once_ = true; }

  // Door plane of the current (possibly opened) door pose: normal oriented
  // toward the robot, plane = {p : normal . p = offset}.
  void current_plane(Vec3* normal, double* offset) const;

  // World position of the engaged grasp point (or the handle anchor when not
  // engaged), on the current door plane.
  Vec3 handle_world_position() const;

  // Tangential travel of the handle point along the opening direction, in
  // meters; door_angle_rad == travel / hinge radius for hinged doors.
  double door_travel_m() const { return door_travel_m_; }
  double max_travel_m() const { return max_travel_m_; }
  double hinge_radius_m() const { return hinge_radius_m_; }

  bool fully_open() const;

  // True while a commanded displacement is pressing into a blocked door.
  double blocked_door_m() const { return door_cmd_m_ - door_travel_signed_(); }

 private:
  double door_travel_signed_() const { return door_travel_m_; }
  void apply_gripper_(double target_m, const Vec2& grasp_px);
  void update_engagement_(const Vec2& grasp_px);
  double opening_sign_() const;  // maps push-axis (+away) to opening travel
  Vec3 closed_handle_position_() const;

  DoorSpec spec_;
  Config cfg_;
  DoorState door_;
  RobotState robot_;
  Rng rng_;
  Rng render_rng_;
  int step_count_ = 0;

  // Position-control trackers.
  double handle_cmd_rad = 0.0;
  double door_cmd_m_ = 0.0;      // commanded travel along the opening direction
  double door_travel_m_ = 0.0;   // actual travel in [0, max_travel]
  double max_travel_m_ = 0.0;
  double hinge_radius_m_ = 1.0;
  double gripper_target_m_ = 0.08;

  bool hazard_ = false;
  std::string hazard_reason_;
  bool force_miss_once_ = false;

  struct ActiveDisturbance {
    Disturbance d;
    int start_step = 0;
  };
  std::vector<ActiveDisturbance> disturbances_;
};

}  // namespace hado
