// Ground-truth door descriptions and their on-disk suite format.
//
// A suite file is plain text, one document per door, documents separated by a
// line containing only "---". Each document is a set of "key: value" lines
// using exactly the field names below; unknown keys abort the parse.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hado/geometry.hpp"

namespace hado {

enum class HandleType { Lever, Knob, Crossbar, CabinetHandle };
enum class SwingType { Push, Pull, Slide };
enum class HingeSide { Left, Right };
enum class UnlockDirection { CW, CCW, Either, None };

const char* to_string(HandleType t);
const char* to_string(SwingType s);
const char* to_string(HingeSide h);
const char* to_string(UnlockDirection d);

// Pixel-space segment on which a grasp succeeds.
struct PxSegment {
  Vec2 a;
  Vec2 b;
};

struct HandleSpec {
  HandleType handle_type = HandleType::Lever;
  Vec2 anchor_px{320, 240};
  Vec2 extent_px{60, 14};
  Vec2 rotation_axis_px{290, 240};
  UnlockDirection unlock_direction = UnlockDirection::CW;
  double rotation_radius_m = 0.09;
  double unlock_angle_rad = 0.6109;
  double hard_stop_slack_rad = 0.0524;
  std::vector<PxSegment> graspable_region;
  double capture_radius_px = 8.0;

  void validate() const;  // throws ParseError on invariant breaks
};

struct DoorSpec {
  std::string id = "door";
  HandleSpec handle;
  SwingType swing = SwingType::Pull;
  HingeSide hinge_side = HingeSide::Left;
  double max_open_angle_rad = kPi / 2.0;  // max_extension_m when swing == Slide
  bool locked = false;
  Vec3 plane_origin_m{0, 0, 1.2};
  Vec3 plane_normal{0, 0, -1};
  double door_width_m = 0.9;
  double door_height_m = 2.0;
  double point_cloud_noise_sigma_m = 0.002;
  double outlier_fraction = 0.0;

  void validate() const;

  // True when the latch mechanics admit success at all.
  bool solvable() const;

  // Doors with a latch that must be rotated open (lever / knob handles).
  bool has_latch() const;
};

struct DoorState {
  double handle_angle_rad = 0.0;
  bool unlocked = false;
  double door_angle_rad = 0.0;  // extension_m when swing == Slide
  bool gripper_engaged = false;
  std::optional<Vec2> gripper_point_px;
};

// Parses a whole suite. Throws ParseError (with a line number) on unknown
// fields, bad values, or broken invariants.
std::vector<DoorSpec> load_suite(const std::string& path);
std::vector<DoorSpec> parse_suite(const std::string& text, const std::string& origin);

std::string serialize_suite(const std::vector<DoorSpec>& doors);
void save_suite(const std::string& path, const std::vector<DoorSpec>& doors);

// Stable content hash, stored in episode records so replay can detect a
// mismatched suite file.
std::uint64_t spec_hash(const DoorSpec& d);

// Randomized door generator for fuzz suites; parameter ranges cover the four
// handle types and both swing senses.
DoorSpec random_door(std::uint64_t seed, const std::string& id);

}  // namespace hado
