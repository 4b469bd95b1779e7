#include "hado/haptics.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "hado/errors.hpp"

namespace hado {

const char* to_string(HapticEventKind k) {
  switch (k) {
    case HapticEventKind::RotationLimit: return "RotationLimit";
    case HapticEventKind::CollisionSpike: return "CollisionSpike";
    case HapticEventKind::ContactLost: return "ContactLost";
    case HapticEventKind::PushDetected: return "PushDetected";
    case HapticEventKind::PullDetected: return "PullDetected";
    case HapticEventKind::Nominal: return "Nominal";
  }
  return "?";
}

const char* to_string(SwingClass s) {
  switch (s) {
    case SwingClass::Push: return "Push";
    case SwingClass::Pull: return "Pull";
    case SwingClass::Inconclusive: return "Inconclusive";
  }
  return "?";
}

void HapticTrace::write_csv(std::ostream& os) const {
  os << "t_s,c0,c1,c2,c3,c4,c5,c6,resistance\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.6f", s.t_s);
    os << buf;
    for (double c : s.joint_currents_A) {
      std::snprintf(buf, sizeof buf, ",%.6f", c);
      os << buf;
    }
    os << (s.gripper_resistance == GripperResistance::High ? ",High" : ",Low") << "\n";
  }
}

std::string HapticTrace::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

HapticTrace HapticTrace::parse_csv(std::istream& is) {
  HapticTrace trace;
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line_number == 1) {
      if (line.rfind("t_s,", 0) != 0)
        throw ParseError("missing haptic CSV header", line_number);
      continue;
    }
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    HapticSample s;
    if (!std::getline(ss, cell, ',')) throw ParseError("short row", line_number);
    s.t_s = std::stod(cell);
    for (int j = 0; j < kJointCount; ++j) {
      if (!std::getline(ss, cell, ',')) throw ParseError("short row", line_number);
      s.joint_currents_A[j] = std::stod(cell);
    }
    if (!std::getline(ss, cell, ',')) throw ParseError("short row", line_number);
    if (cell == "High")
      s.gripper_resistance = GripperResistance::High;
    else if (cell == "Low")
      s.gripper_resistance = GripperResistance::Low;
    else
      throw ParseError("bad resistance value '" + cell + "'", line_number);
    trace.append(s);
  }
  return trace;
}

HapticEvent detect_rotation_limit(const HapticTrace& trace, double threshold_A,
                                  int window) {
  int consecutive = 0;
  for (const auto& s : trace.samples) {
    if (s.elbow_A() > threshold_A) {
      if (++consecutive >= window)
        return {HapticEventKind::RotationLimit, s.t_s, s.elbow_A()};
    } else {
      consecutive = 0;
    }
  }
  return {HapticEventKind::Nominal,
          trace.empty() ? 0.0 : trace.samples.back().t_s, 0.0};
}

bool detect_contact_lost(const HapticSample& sample) {
  return sample.gripper_resistance == GripperResistance::Low;
}

SwingClass classify_push_pull(const HapticTrace& probe, double baseline_A,
                              double delta_threshold_A) {
  if (probe.empty()) return SwingClass::Inconclusive;
  const std::size_t half = probe.size() / 2;

  double mean = 0.0;
  bool all_within_band = true;
  std::size_t n = 0;
  for (std::size_t i = half; i < probe.size(); ++i) {
    const double c = probe.samples[i].elbow_A();
    mean += c;
    ++n;
    if (std::abs(c - baseline_A) > delta_threshold_A) all_within_band = false;
  }
  mean /= static_cast<double>(n);

  if (mean > baseline_A + delta_threshold_A) return SwingClass::Push;
  if (all_within_band) return SwingClass::Pull;
  return SwingClass::Inconclusive;
}

}  // namespace hado
