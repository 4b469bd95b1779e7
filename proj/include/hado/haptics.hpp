// Interpretation of joint-current and gripper-resistance streams into the
// discrete events the primitives and planner consume.
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace hado {

inline constexpr int kJointCount = 7;
inline constexpr int kElbowJoint = 4;

enum class GripperResistance { High, Low };

struct HapticSample {
  double t_s = 0.0;
  std::array<double, kJointCount> joint_currents_A{};
  GripperResistance gripper_resistance = GripperResistance::Low;

  double elbow_A() const { return joint_currents_A[kElbowJoint]; }
};

struct HapticTrace {
  std::vector<HapticSample> samples;

  void append(const HapticSample& s) { samples.push_back(s); }
  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }

  // CSV columns, in this order: t_s, c0..c6, resistance.
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
  static HapticTrace parse_csv(std::istream& is);
};

enum class HapticEventKind {
  RotationLimit,
  CollisionSpike,
  ContactLost,
  PushDetected,
  PullDetected,
  Nominal
};

const char* to_string(HapticEventKind k);

struct HapticEvent {
  HapticEventKind kind = HapticEventKind::Nominal;
  double t_s = 0.0;
  double evidence_A = 0.0;
};

// First time the elbow current exceeds threshold_A for `window` consecutive
// samples; the event carries the time of the window-completing sample.
HapticEvent detect_rotation_limit(const HapticTrace& trace, double threshold_A,
                                  int window);

// True iff the gripper reports low resistance after a grasp was established.
bool detect_contact_lost(const HapticSample& sample);

enum class SwingClass { Push, Pull, Inconclusive };

const char* to_string(SwingClass s);

// Classification over a probe-pull trace. Push: the mean elbow current over
// the probe's second half exceeds baseline + delta (the door resists the
// pull). Pull: the current stays within +-delta of baseline throughout the
// second half (the door follows). Anything else is Inconclusive.
SwingClass classify_push_pull(const HapticTrace& probe, double baseline_A,
                              double delta_threshold_A);

}  // namespace hado
