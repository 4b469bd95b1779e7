// The one place the sign convention for rotation parameters lives.
#pragma once

namespace hado {

enum class RotationDirection { CW, CCW };

// Contract shared by perception (which emits signed rotation parameters) and
// the unlock primitives (which consume them): positive sign means CCW.
inline constexpr double kCcwSign = +1.0;

inline RotationDirection direction_from_sign(double rotation_param) {
  return rotation_param * kCcwSign >= 0.0 ? RotationDirection::CCW
                                          : RotationDirection::CW;
}

inline double sign_for_direction(RotationDirection d) {
  return d == RotationDirection::CCW ? kCcwSign : -kCcwSign;
}

inline RotationDirection opposite(RotationDirection d) {
  return d == RotationDirection::CCW ? RotationDirection::CW
                                     : RotationDirection::CCW;
}

inline const char* to_string(RotationDirection d) {
  return d == RotationDirection::CCW ? "CCW" : "CW";
}

}  // namespace hado
